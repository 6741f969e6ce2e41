//! Sampled fields on tensor-product grids and finite-difference derivatives.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::linear::Side;
use crate::algebra::CMatrix;
use crate::error::{Error, Result};

/// Samples of a matrix flow along one coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub nodes: Vec<f64>,
    pub values: Vec<CMatrix>,
    pub side: Side,
}

impl Trajectory {
    pub fn last(&self) -> &CMatrix {
        self.values.last().expect("trajectory has at least one node")
    }

    pub fn to_grid(&self) -> FieldOnGrid {
        FieldOnGrid {
            axes: vec![self.nodes.clone()],
            values: self.values.clone(),
        }
    }
}

/// Matrix values on a tensor-product grid, row-major with the last axis
/// varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldOnGrid {
    axes: Vec<Vec<f64>>,
    values: Vec<CMatrix>,
}

/// Residual summary attached to computed results.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub residuals: BTreeMap<String, f64>,
    pub metadata: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl ResidualReport {
    pub fn insert(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.insert(name.into(), value);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().fold(0.0, |a, &b| a.max(b))
    }

    pub fn merge(&mut self, prefix: &str, other: ResidualReport) {
        for (k, v) in other.residuals {
            self.residuals.insert(format!("{prefix}{k}"), v);
        }
        for (k, v) in other.metadata {
            self.metadata.insert(format!("{prefix}{k}"), v);
        }
        self.warnings.extend(other.warnings);
    }
}

pub(crate) fn check_axes(axes: &[Vec<f64>]) -> Result<()> {
    if axes.is_empty() {
        return Err(Error::InvalidInput("grid needs at least one axis".into()));
    }
    for (k, ax) in axes.iter().enumerate() {
        if ax.is_empty() {
            return Err(Error::TooFewNodes {
                axis: k,
                needed: 1,
                found: 0,
            });
        }
        if ax.iter().any(|x| !x.is_finite()) || ax.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!("axis {k} is not strictly increasing")));
        }
    }
    Ok(())
}

/// Uniform axis with `nodes` points on `[lo, hi]`.
pub fn uniform_axis(lo: f64, hi: f64, nodes: usize) -> Vec<f64> {
    match nodes {
        0 => vec![],
        1 => vec![lo],
        _ => (0..nodes)
            .map(|i| lo + (hi - lo) * i as f64 / (nodes - 1) as f64)
            .collect(),
    }
}

impl FieldOnGrid {
    pub fn new(axes: Vec<Vec<f64>>, values: Vec<CMatrix>) -> Result<Self> {
        check_axes(&axes)?;
        let count: usize = axes.iter().map(Vec::len).product();
        if values.len() != count {
            return Err(Error::Shape(format!("{} values for {count} grid points", values.len())));
        }
        let shape = values[0].shape();
        if values.iter().any(|v| v.shape() != shape) {
            return Err(Error::Shape("grid values differ in shape".into()));
        }
        Ok(Self { axes, values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(axes: Vec<Vec<f64>>, mut f: impl FnMut(&[f64]) -> Result<CMatrix>) -> Result<Self> {
        check_axes(&axes)?;
        let count: usize = axes.iter().map(Vec::len).product();
        let mut values = Vec::with_capacity(count);
        let mut x = vec![0.0; axes.len()];
        for flat in 0..count {
            point_into(&axes, flat, &mut x);
            values.push(f(&x)?);
        }
        Self::new(axes, values)
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn values(&self) -> &[CMatrix] {
        &self.values
    }

    pub fn into_values(self) -> Vec<CMatrix> {
        self.values
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        flat_index(&self.shape(), idx)
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        multi_index(&self.shape(), flat)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.axes.len()];
        point_into(&self.axes, flat, &mut x);
        x
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|f| self.point(f)).collect()
    }

    pub fn get(&self, idx: &[usize]) -> &CMatrix {
        &self.values[self.flat_index(idx)]
    }

    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> FieldOnGrid {
        FieldOnGrid {
            axes: self.axes.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, mut f: impl FnMut(&[f64], &CMatrix) -> Result<CMatrix>) -> Result<FieldOnGrid> {
        let mut values = Vec::with_capacity(self.len());
        for (i, v) in self.values.iter().enumerate() {
            values.push(f(&self.point(i), v)?);
        }
        Ok(FieldOnGrid {
            axes: self.axes.clone(),
            values,
        })
    }

    pub fn max_abs_diff(&self, other: &FieldOnGrid) -> f64 {
        assert_eq!(self.len(), other.len(), "grids differ in size");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    /// Flat indices of points at least `width / 2` nodes away from every
    /// boundary along the axes in `dirs`.
    pub fn interior_indices(&self, width: usize, dirs: &[usize]) -> Vec<usize> {
        let shape = self.shape();
        let half = width / 2;
        (0..self.len())
            .filter(|&f| {
                let idx = multi_index(&shape, f);
                dirs.iter().all(|&d| idx[d] >= half && idx[d] + half < shape[d])
            })
            .collect()
    }

    /// Multilinear interpolation, clamped to the grid box.
    pub fn interpolate(&self, x: &[f64]) -> CMatrix {
        let shape = self.shape();
        let mut base = vec![0usize; shape.len()];
        let mut frac = vec![0.0; shape.len()];
        for (d, ax) in self.axes.iter().enumerate() {
            if ax.len() == 1 {
                continue;
            }
            let xi = x[d].clamp(ax[0], ax[ax.len() - 1]);
            let j = match ax.partition_point(|&a| a <= xi) {
                0 => 0,
                k => (k - 1).min(ax.len() - 2),
            };
            base[d] = j;
            frac[d] = (xi - ax[j]) / (ax[j + 1] - ax[j]);
        }
        let (r, c) = self.values[0].shape();
        let mut out = CMatrix::zeros(r, c);
        let active: Vec<usize> = (0..shape.len()).filter(|&d| shape[d] > 1).collect();
        for corner in 0..(1usize << active.len()) {
            let mut idx = base.clone();
            let mut w = 1.0;
            for (bit, &d) in active.iter().enumerate() {
                if corner >> bit & 1 == 1 {
                    idx[d] += 1;
                    w *= frac[d];
                } else {
                    w *= 1.0 - frac[d];
                }
            }
            if w != 0.0 {
                out += &self.values[flat_index(&shape, &idx)].scale_real(w);
            }
        }
        out
    }
}

pub(crate) fn flat_index(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &n)| acc * n + i)
}

pub(crate) fn multi_index(shape: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for d in (0..shape.len()).rev() {
        idx[d] = flat % shape[d];
        flat /= shape[d];
    }
    idx
}

fn point_into(axes: &[Vec<f64>], flat: usize, x: &mut [f64]) {
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    for (d, i) in multi_index(&shape, flat).into_iter().enumerate() {
        x[d] = axes[d][i];
    }
}

/// Central finite-difference stencils for first derivatives. Near the
/// boundary the same number of nodes is used, shifted inward.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stencil {
    #[default]
    Central2,
    Central4,
}

impl Stencil {
    pub fn width(self) -> usize {
        match self {
            Stencil::Central2 => 3,
            Stencil::Central4 => 5,
        }
    }
}

/// Fornberg weights for the first derivative at `z` from values at `x`.
pub fn fd_weights(z: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// Derivative along axis `dir` of arbitrary values laid out on `axes`.
pub fn derivative_along(
    axes: &[Vec<f64>],
    values: &[CMatrix],
    dir: usize,
    stencil: Stencil,
) -> Result<Vec<CMatrix>> {
    if dir >= axes.len() {
        return Err(Error::Index(format!("axis {dir} of {}", axes.len())));
    }
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let n = shape[dir];
    let w = stencil.width();
    if n < w {
        return Err(Error::TooFewNodes {
            axis: dir,
            needed: w,
            found: n,
        });
    }
    let ax = &axes[dir];
    let windows: Vec<(usize, Vec<f64>)> = (0..n)
        .map(|k| {
            let start = k.saturating_sub(w / 2).min(n - w);
            (start, fd_weights(ax[k], &ax[start..start + w]))
        })
        .collect();
    let stride: usize = shape[dir + 1..].iter().product();
    let mut out = Vec::with_capacity(values.len());
    for (flat, v) in values.iter().enumerate() {
        let k = (flat / stride) % n;
        let (start, wts) = &windows[k];
        let (r, c) = v.shape();
        let mut acc = CMatrix::zeros(r, c);
        for (j, &wt) in wts.iter().enumerate() {
            let g = flat - k * stride + (start + j) * stride;
            acc += &values[g].scale_real(wt);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Second-order derivative of a sampled field along `dir`.
pub fn partial_derivative(field: &FieldOnGrid, dir: usize) -> Result<FieldOnGrid> {
    partial_derivative_with(field, dir, Stencil::Central2)
}

pub fn partial_derivative_with(field: &FieldOnGrid, dir: usize, stencil: Stencil) -> Result<FieldOnGrid> {
    let values = derivative_along(&field.axes, &field.values, dir, stencil)?;
    Ok(FieldOnGrid {
        axes: field.axes.clone(),
        values,
    })
}
