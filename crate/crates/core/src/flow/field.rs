//! Matrix-valued coefficient fields.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::FieldOnGrid;
use crate::algebra::CMatrix;
use crate::error::{Error, Result};

type EvalFn = dyn Fn(usize, &[f64]) -> CMatrix + Send + Sync;
type PartialFn = dyn Fn(usize, usize, &[f64]) -> CMatrix + Send + Sync;

/// Relative step of the five-point stencil used when a field has no
/// analytic partials.
pub const FIELD_FD_STEP: f64 = 1e-3;

/// A (possibly multi-component) matrix-valued function of `dim_in` real
/// coordinates. Component `i` of a multi-component field is the coefficient
/// attached to direction `i` (e.g. `λ_i` of a multidimensional flow).
#[derive(Clone)]
pub struct MatrixField {
    dim_in: usize,
    components: usize,
    shape: (usize, usize),
    eval: Arc<EvalFn>,
    partials: Option<Arc<PartialFn>>,
    domain: Option<Vec<(f64, f64)>>,
}

impl fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixField")
            .field("dim_in", &self.dim_in)
            .field("components", &self.components)
            .field("shape", &self.shape)
            .field("analytic_partials", &self.partials.is_some())
            .field("domain", &self.domain)
            .finish()
    }
}

impl MatrixField {
    /// Single-component field.
    pub fn new(
        dim_in: usize,
        shape: (usize, usize),
        f: impl Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
    ) -> Self {
        Self::multi(dim_in, 1, shape, move |_, x| f(x))
    }

    pub fn multi(
        dim_in: usize,
        components: usize,
        shape: (usize, usize),
        f: impl Fn(usize, &[f64]) -> CMatrix + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim_in,
            components,
            shape,
            eval: Arc::new(f),
            partials: None,
            domain: None,
        }
    }

    /// Scalar (1x1) field.
    pub fn scalar(dim_in: usize, f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        Self::new(dim_in, (1, 1), move |x| CMatrix::scalar(f(x)))
    }

    pub fn constant(dim_in: usize, m: CMatrix) -> Self {
        Self::constant_multi(dim_in, vec![m])
    }

    /// Constant multi-component field; all matrices must share a shape.
    pub fn constant_multi(dim_in: usize, ms: Vec<CMatrix>) -> Self {
        assert!(!ms.is_empty(), "constant_multi needs at least one component");
        let shape = ms[0].shape();
        assert!(ms.iter().all(|m| m.shape() == shape), "component shapes differ");
        let comps = ms.len();
        let ms = Arc::new(ms);
        let zero = CMatrix::zeros(shape.0, shape.1);
        Self::multi(dim_in, comps, shape, {
            let ms = ms.clone();
            move |i, _| ms[i].clone()
        })
        .with_partials(move |_, _, _| zero.clone())
    }

    pub fn zero(dim_in: usize, components: usize, n: usize) -> Self {
        Self::constant_multi(dim_in, vec![CMatrix::zeros(n, n); components])
    }

    /// Attaches analytic partials `(component, coordinate, x) -> ∂λ_c/∂x^k`.
    pub fn with_partials(
        mut self,
        p: impl Fn(usize, usize, &[f64]) -> CMatrix + Send + Sync + 'static,
    ) -> Self {
        self.partials = Some(Arc::new(p));
        self
    }

    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Self {
        assert_eq!(domain.len(), self.dim_in, "domain box dimension");
        self.domain = Some(domain);
        self
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn domain(&self) -> Option<&[(f64, f64)]> {
        self.domain.as_deref()
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    fn check_args(&self, comp: usize, x: &[f64]) -> Result<()> {
        if comp >= self.components {
            return Err(Error::Index(format!(
                "component {comp} of a {}-component field",
                self.components
            )));
        }
        if x.len() != self.dim_in {
            return Err(Error::Shape(format!(
                "field takes {} coordinates, got {}",
                self.dim_in,
                x.len()
            )));
        }
        Ok(())
    }

    fn check_value(&self, m: CMatrix, x: &[f64]) -> Result<CMatrix> {
        if m.shape() != self.shape {
            return Err(Error::Evaluation(format!(
                "field returned {}x{}, declared {}x{}",
                m.rows(),
                m.cols(),
                self.shape.0,
                self.shape.1
            )));
        }
        if !m.is_finite() {
            return Err(Error::Evaluation(format!("non-finite field value at {x:?}")));
        }
        Ok(m)
    }

    /// Evaluates component `comp` at `x`.
    pub fn eval(&self, comp: usize, x: &[f64]) -> Result<CMatrix> {
        self.check_args(comp, x)?;
        self.check_value((self.eval)(comp, x), x)
    }

    /// Evaluates the first component.
    pub fn at(&self, x: &[f64]) -> Result<CMatrix> {
        self.eval(0, x)
    }

    /// `∂λ_comp / ∂x^coord` at `x`: analytic when available, otherwise a
    /// fourth-order central difference.
    pub fn partial(&self, comp: usize, coord: usize, x: &[f64]) -> Result<CMatrix> {
        self.check_args(comp, x)?;
        if coord >= self.dim_in {
            return Err(Error::Index(format!("coordinate {coord} of {}", self.dim_in)));
        }
        match &self.partials {
            Some(p) => self.check_value(p(comp, coord, x), x),
            None => self.fd_partial(comp, coord, x),
        }
    }

    /// Five-point central difference, ignoring analytic partials.
    pub fn fd_partial(&self, comp: usize, coord: usize, x: &[f64]) -> Result<CMatrix> {
        let h = FIELD_FD_STEP * x[coord].abs().max(1.0);
        let mut y = x.to_vec();
        let mut at = |dx: f64| {
            y[coord] = x[coord] + dx;
            self.eval(comp, &y)
        };
        let fp2 = at(2.0 * h)?;
        let fp1 = at(h)?;
        let fm1 = at(-h)?;
        let fm2 = at(-2.0 * h)?;
        let num = &(&(&fm2 - &fp2) + &fp1.scale_real(8.0)) - &fm1.scale_real(8.0);
        Ok(num.scale_real(1.0 / (12.0 * h)))
    }

    /// Largest discrepancy between analytic partials and finite differences
    /// over `points` (zero for fields without analytic partials).
    pub fn partial_discrepancy(&self, points: &[Vec<f64>]) -> Result<f64> {
        if self.partials.is_none() {
            return Ok(0.0);
        }
        let mut worst = 0.0f64;
        for x in points {
            for c in 0..self.components {
                for k in 0..self.dim_in {
                    let a = self.partial(c, k, x)?;
                    let f = self.fd_partial(c, k, x)?;
                    worst = worst.max(a.max_abs_diff(&f));
                }
            }
        }
        Ok(worst)
    }

    /// Single-component view of component `i`.
    pub fn component(&self, i: usize) -> MatrixField {
        self.select_components(&[i])
    }

    pub fn select_components(&self, indices: &[usize]) -> MatrixField {
        assert!(indices.iter().all(|&i| i < self.components), "component index");
        let idx: Arc<Vec<usize>> = Arc::new(indices.to_vec());
        let eval = self.eval.clone();
        let map = idx.clone();
        let mut out = Self::multi(self.dim_in, indices.len(), self.shape, move |c, x| eval(map[c], x));
        if let Some(p) = &self.partials {
            let p = p.clone();
            out = out.with_partials(move |c, k, x| p(idx[c], k, x));
        }
        out.domain = self.domain.clone();
        out
    }

    /// Restriction to the coordinates `coords`, the others frozen at `base`.
    pub fn restrict(&self, coords: &[usize], base: &[f64]) -> MatrixField {
        assert_eq!(base.len(), self.dim_in, "restrict: base point dimension");
        assert!(coords.iter().all(|&k| k < self.dim_in), "restrict: coordinate index");
        let coords: Arc<Vec<usize>> = Arc::new(coords.to_vec());
        let base: Arc<Vec<f64>> = Arc::new(base.to_vec());
        let lift = {
            let coords = coords.clone();
            let base = base.clone();
            move |x: &[f64]| {
                let mut full = (*base).clone();
                for (&k, &v) in coords.iter().zip(x) {
                    full[k] = v;
                }
                full
            }
        };
        let eval = self.eval.clone();
        let lift_e = lift.clone();
        let mut out = Self::multi(coords.len(), self.components, self.shape, move |c, x| {
            eval(c, &lift_e(x))
        });
        if let Some(p) = &self.partials {
            let p = p.clone();
            let coords = coords.clone();
            out = out.with_partials(move |c, k, x| p(c, coords[k], &lift(x)));
        }
        if let Some(dom) = &self.domain {
            out.domain = Some(coords.iter().map(|&k| dom[k]).collect());
        }
        out
    }

    /// Pointwise transformation `(component, x, value) -> value'`. Analytic
    /// partials are dropped.
    pub fn map(
        &self,
        shape: (usize, usize),
        f: impl Fn(usize, &[f64], CMatrix) -> CMatrix + Send + Sync + 'static,
    ) -> MatrixField {
        let eval = self.eval.clone();
        Self::multi(self.dim_in, self.components, shape, move |c, x| f(c, x, eval(c, x)))
    }

    /// Applies an affine map to values; its linear part `linear` is applied to
    /// partials, which are kept.
    pub fn map_affine(
        &self,
        value: impl Fn(CMatrix) -> CMatrix + Send + Sync + 'static,
        linear: impl Fn(CMatrix) -> CMatrix + Send + Sync + 'static,
    ) -> MatrixField {
        self.map_affine_to(self.shape, value, linear)
    }

    /// As [`MatrixField::map_affine`], with values of a different shape.
    pub fn map_affine_to(
        &self,
        shape: (usize, usize),
        value: impl Fn(CMatrix) -> CMatrix + Send + Sync + 'static,
        linear: impl Fn(CMatrix) -> CMatrix + Send + Sync + 'static,
    ) -> MatrixField {
        let eval = self.eval.clone();
        let mut out = Self::multi(self.dim_in, self.components, shape, move |c, x| value(eval(c, x)));
        if let Some(p) = &self.partials {
            let p = p.clone();
            out = out.with_partials(move |c, k, x| linear(p(c, k, x)));
        }
        out.domain = self.domain.clone();
        out
    }

    /// Multi-component field built from one polynomial per component, with
    /// exact partials.
    pub fn from_polynomials(polys: Vec<MatrixPolynomial>) -> Result<MatrixField> {
        let first = polys
            .first()
            .ok_or_else(|| Error::InvalidInput("no polynomial components".into()))?;
        let (dim_in, shape) = (first.dim_in, first.shape);
        if polys.iter().any(|p| p.dim_in != dim_in || p.shape != shape) {
            return Err(Error::InvalidInput("polynomial components disagree in shape".into()));
        }
        let polys = Arc::new(polys);
        let pe = polys.clone();
        Ok(
            Self::multi(dim_in, polys.len(), shape, move |c, x| pe[c].eval(x))
                .with_partials(move |c, k, x| polys[c].partial(k, x)),
        )
    }

    /// Multilinear interpolation of sampled values; coordinates outside the
    /// grid are clamped to the boundary cell.
    pub fn from_grid(grids: Vec<FieldOnGrid>) -> Result<MatrixField> {
        let first = grids
            .first()
            .ok_or_else(|| Error::InvalidInput("no grid components".into()))?;
        let dim_in = first.dims();
        let shape = first.values()[0].shape();
        if grids.iter().any(|g| g.dims() != dim_in || g.values()[0].shape() != shape) {
            return Err(Error::InvalidInput("grid components disagree".into()));
        }
        let grids = Arc::new(grids);
        Ok(Self::multi(dim_in, grids.len(), shape, move |c, x| grids[c].interpolate(x)))
    }
}

/// One term `coeff · Π x_k^{powers_k}` of a matrix polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub powers: Vec<u32>,
    pub coeff: CMatrix,
}

/// Matrix-valued polynomial in `dim_in` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial {
    dim_in: usize,
    shape: (usize, usize),
    terms: Vec<Monomial>,
}

impl MatrixPolynomial {
    pub fn new(dim_in: usize, shape: (usize, usize), terms: Vec<Monomial>) -> Result<Self> {
        for t in &terms {
            if t.powers.len() != dim_in {
                return Err(Error::InvalidInput(format!(
                    "monomial has {} exponents for {dim_in} coordinates",
                    t.powers.len()
                )));
            }
            if t.coeff.shape() != shape {
                return Err(Error::Shape(format!(
                    "monomial coefficient {}x{} in a {}x{} polynomial",
                    t.coeff.rows(),
                    t.coeff.cols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        Ok(Self { dim_in, shape, terms })
    }

    pub fn constant(dim_in: usize, m: CMatrix) -> Self {
        Self {
            dim_in,
            shape: m.shape(),
            terms: vec![Monomial {
                powers: vec![0; dim_in],
                coeff: m,
            }],
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.powers.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.shape.0, self.shape.1);
        for t in &self.terms {
            let w: f64 = t.powers.iter().zip(x).map(|(&p, &xi)| xi.powi(p as i32)).product();
            out += &t.coeff.scale_real(w);
        }
        out
    }

    pub fn partial(&self, coord: usize, x: &[f64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.shape.0, self.shape.1);
        for t in &self.terms {
            let pk = t.powers[coord];
            if pk == 0 {
                continue;
            }
            let w: f64 = t
                .powers
                .iter()
                .zip(x)
                .enumerate()
                .map(|(k, (&p, &xi))| {
                    if k == coord {
                        pk as f64 * xi.powi(p as i32 - 1)
                    } else {
                        xi.powi(p as i32)
                    }
                })
                .product();
            out += &t.coeff.scale_real(w);
        }
        out
    }

    pub fn into_field(self) -> MatrixField {
        MatrixField::from_polynomials(vec![self]).expect("single polynomial is consistent")
    }
}
