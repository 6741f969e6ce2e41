//! Linear flows `dψ = ψλ dx` (right) or `dψ = λψ dx` (left), in one and
//! several dimensions.

use serde::{Deserialize, Serialize};

use super::curvature::zero_curvature_residual_side;
use super::field::MatrixField;
use super::grid::{check_axes, multi_index, uniform_axis, FieldOnGrid, ResidualReport, Trajectory};
use crate::algebra::CMatrix;
use crate::error::{Error, Result};

/// Which side the coefficient acts on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// `dψ = ψ λ dx`
    #[default]
    Right,
    /// `dψ = λ ψ dx`
    Left,
}

impl Side {
    pub fn apply(self, psi: &CMatrix, lambda: &CMatrix) -> CMatrix {
        match self {
            Side::Right => psi * lambda,
            Side::Left => lambda * psi,
        }
    }
}

/// Fixed-step integrator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Classical fourth-order Runge–Kutta.
    #[default]
    Rk4,
    /// `ψ_{k+1} = ψ_k · exp(h λ(x_k + h/2))`; second order, keeps ψ invertible.
    MagnusMidpoint,
}

fn divergence(x: &[f64], last: &CMatrix) -> Error {
    Error::Divergence {
        coordinate: x.to_vec(),
        last_state: Box::new(last.clone()),
    }
}

/// One step of size `h` along coordinate `dir` from the point `x`.
pub(crate) fn linear_step(
    field: &MatrixField,
    comp: usize,
    dir: usize,
    x: &[f64],
    h: f64,
    psi: &CMatrix,
    side: Side,
    method: Method,
) -> Result<CMatrix> {
    let mut y = x.to_vec();
    let mut lam = |dx: f64| {
        y[dir] = x[dir] + dx;
        field.eval(comp, &y)
    };
    let next = match method {
        Method::Rk4 => {
            let l0 = lam(0.0)?;
            let lm = lam(0.5 * h)?;
            let l1 = lam(h)?;
            let k1 = side.apply(psi, &l0);
            let k2 = side.apply(&(psi + &k1.scale_real(0.5 * h)), &lm);
            let k3 = side.apply(&(psi + &k2.scale_real(0.5 * h)), &lm);
            let k4 = side.apply(&(psi + &k3.scale_real(h)), &l1);
            let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
            psi + &incr.scale_real(h / 6.0)
        }
        Method::MagnusMidpoint => {
            let e = lam(0.5 * h)?.scale_real(h).matexp();
            side.apply(psi, &e)
        }
    };
    if !next.is_finite() {
        y[dir] = x[dir] + h;
        return Err(divergence(&y, psi));
    }
    Ok(next)
}

/// Integrates a one-dimensional linear flow on `steps` uniform steps.
pub fn solve_linear_1d(
    field: &MatrixField,
    psi0: &CMatrix,
    interval: (f64, f64),
    steps: usize,
    side: Side,
    method: Method,
) -> Result<Trajectory> {
    if field.dim_in() != 1 {
        return Err(Error::InvalidInput(format!(
            "1D flow needs a field of one coordinate, got {}",
            field.dim_in()
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    let (r, c) = field.shape();
    if r != c || psi0.shape() != (r, r) {
        return Err(Error::Shape(format!(
            "initial value {}x{} for a {r}x{c} field",
            psi0.rows(),
            psi0.cols()
        )));
    }
    let nodes = uniform_axis(interval.0, interval.1, steps + 1);
    let h = (interval.1 - interval.0) / steps as f64;
    let mut values = Vec::with_capacity(steps + 1);
    values.push(psi0.clone());
    for k in 0..steps {
        let next = linear_step(field, 0, 0, &[nodes[k]], h, &values[k], side, method)?;
        values.push(next);
    }
    Ok(Trajectory { nodes, values, side })
}

/// `P exp ∫ λ dx` over the interval (right action, starting from `I`).
pub fn path_ordered_exp(field: &MatrixField, interval: (f64, f64), steps: usize) -> Result<CMatrix> {
    path_ordered_exp_with(field, interval, steps, Method::Rk4)
}

pub fn path_ordered_exp_with(
    field: &MatrixField,
    interval: (f64, f64),
    steps: usize,
    method: Method,
) -> Result<CMatrix> {
    let n = field.shape().0;
    let t = solve_linear_1d(field, &CMatrix::identity(n), interval, steps, Side::Right, method)?;
    Ok(t.last().clone())
}

/// Fills a tensor grid by integrating along staircase paths from the first
/// node of every axis: first along `order[0]`, then `order[1]` from every
/// point already reached, and so on. `step(dir, x, h, state)` advances the
/// state by `h` along `dir` from `x`; each grid interval is split into
/// `substeps` equal steps. Values are returned in row-major grid order.
pub(crate) fn staircase<S: Clone>(
    axes: &[Vec<f64>],
    order: &[usize],
    substeps: usize,
    init: S,
    mut step: impl FnMut(usize, &[f64], f64, &S) -> Result<S>,
) -> Result<Vec<S>> {
    check_axes(axes)?;
    let d = axes.len();
    let mut seen = vec![false; d];
    if order.len() != d || order.iter().any(|&k| k >= d || std::mem::replace(&mut seen[k], true)) {
        return Err(Error::InvalidInput(format!("{order:?} is not a permutation of 0..{d}")));
    }
    let substeps = substeps.max(1);
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let mut values: Vec<Option<S>> = vec![None; total];
    values[0] = Some(init);
    let strides: Vec<usize> = (0..d).map(|k| shape[k + 1..].iter().product()).collect();
    for (t, &dir) in order.iter().enumerate() {
        let later = &order[t + 1..];
        for flat in 0..total {
            let idx = multi_index(&shape, flat);
            if idx[dir] != 0 || later.iter().any(|&k| idx[k] != 0) {
                continue;
            }
            let mut x: Vec<f64> = idx.iter().enumerate().map(|(k, &i)| axes[k][i]).collect();
            let mut state = values[flat].clone().expect("staircase start already filled");
            for j in 0..shape[dir] - 1 {
                let (a, b) = (axes[dir][j], axes[dir][j + 1]);
                let h = (b - a) / substeps as f64;
                for s in 0..substeps {
                    x[dir] = a + s as f64 * h;
                    state = step(dir, &x, h, &state)?;
                }
                x[dir] = b;
                values[flat + (j + 1) * strides[dir]] = Some(state.clone());
            }
        }
    }
    Ok(values.into_iter().map(|v| v.expect("staircase covers the grid")).collect())
}

/// Options for [`solve_linear_md`].
#[derive(Clone, Debug, PartialEq)]
pub struct MdOptions {
    /// Axis order of the staircase (defaults to `0..d`).
    pub order: Option<Vec<usize>>,
    pub side: Side,
    pub method: Method,
    /// Integration steps per grid interval.
    pub substeps: usize,
    /// Zero-curvature gate; exceeding it records a warning.
    pub curvature_gate: Option<f64>,
}

impl Default for MdOptions {
    fn default() -> Self {
        Self {
            order: None,
            side: Side::Right,
            method: Method::Rk4,
            substeps: 4,
            curvature_gate: Some(1e-8),
        }
    }
}

/// Result of a multidimensional linear solve.
#[derive(Clone, Debug, PartialEq)]
pub struct MdSolution {
    pub grid: FieldOnGrid,
    pub report: ResidualReport,
}

/// Integrates `∂_i ψ = ψ λ_i` (or `λ_i ψ`) over a tensor grid.
pub fn solve_linear_md(
    field: &MatrixField,
    psi0: &CMatrix,
    axes: &[Vec<f64>],
    options: &MdOptions,
) -> Result<MdSolution> {
    let d = axes.len();
    if field.dim_in() != d || field.components() != d {
        return Err(Error::Shape(format!(
            "{d}-dimensional grid needs a field with {d} coordinates and components, got {} and {}",
            field.dim_in(),
            field.components()
        )));
    }
    let n = field.shape().0;
    if psi0.shape() != (n, n) {
        return Err(Error::Shape(format!("initial value must be {n}x{n}")));
    }
    let order: Vec<usize> = options.order.clone().unwrap_or_else(|| (0..d).collect());
    let mut report = ResidualReport::default();
    report.note("order", format!("{order:?}"));
    report.note("substeps", options.substeps);
    report.note("method", format!("{:?}", options.method));
    if let (Some(gate), true) = (options.curvature_gate, d >= 2) {
        let curv = zero_curvature_residual_side(field, axes, options.side)?;
        let worst = curv.max_residual();
        report.insert("zero-curvature", worst);
        if worst > gate {
            report.warn(format!(
                "zero-curvature residual {worst:e} exceeds {gate:e}; result depends on the path order"
            ));
        }
    }
    let values = staircase(axes, &order, options.substeps, psi0.clone(), |dir, x, h, psi| {
        linear_step(field, dir, dir, x, h, psi, options.side, options.method)
    })?;
    Ok(MdSolution {
        grid: FieldOnGrid::new(axes.to_vec(), values)?,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::re;

    #[test]
    fn zero_field_keeps_initial_value() {
        let f = MatrixField::zero(1, 1, 2);
        let psi0 = CMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let t = solve_linear_1d(&f, &psi0, (0.0, 1.0), 10, Side::Right, Method::Rk4).unwrap();
        assert!(t.values.iter().all(|v| v == &psi0));
    }

    #[test]
    fn constant_field_gives_exponential() {
        let lam = CMatrix::from_real(2, 2, &[0.1, 1.0, -0.5, 0.3]);
        let f = MatrixField::constant(1, lam.clone());
        for method in [Method::Rk4, Method::MagnusMidpoint] {
            let p = path_ordered_exp_with(&f, (0.0, 1.5), 200, method).unwrap();
            assert!(p.max_abs_diff(&lam.scale_real(1.5).matexp()) < 1e-10);
        }
    }

    #[test]
    fn nilpotent_flow_is_exact() {
        let f = MatrixField::new(1, (2, 2), |x| CMatrix::from_real(2, 2, &[0.0, 0.0, x[0], 0.0]));
        let t = solve_linear_1d(&f, &CMatrix::identity(2), (0.0, 2.0), 8, Side::Right, Method::Rk4).unwrap();
        for (x, v) in t.nodes.iter().zip(&t.values) {
            let want = CMatrix::from_real(2, 2, &[1.0, 0.0, x * x / 2.0, 1.0]);
            assert!(v.max_abs_diff(&want) < 1e-10);
        }
    }

    #[test]
    fn divergence_is_reported() {
        let f = MatrixField::scalar(1, |_| re(1e300));
        let err = solve_linear_1d(&f, &CMatrix::identity(1), (0.0, 10.0), 10, Side::Right, Method::Rk4).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn staircase_visits_every_point_once() {
        let axes = vec![uniform_axis(0.0, 1.0, 3), uniform_axis(0.0, 1.0, 4), uniform_axis(0.0, 1.0, 2)];
        let vals = staircase(&axes, &[2, 0, 1], 1, 0.0f64, |dir, _, h, s| Ok(s + h * (dir + 1) as f64)).unwrap();
        let g = FieldOnGrid::new(axes.clone(), vec![CMatrix::identity(1); 24]).unwrap();
        for (i, v) in vals.iter().enumerate() {
            let x = g.point(i);
            assert!((v - (x[0] + 2.0 * x[1] + 3.0 * x[2])).abs() < 1e-14);
        }
        assert!(staircase(&axes, &[0, 0, 1], 1, 0.0, |_, _, _, s| Ok(*s)).is_err());
    }

    #[test]
    fn commuting_constants_left_side() {
        let l1 = CMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, -0.25]);
        let l2 = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let f = MatrixField::constant_multi(2, vec![l1.clone(), l2.clone()]);
        let psi0 = CMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let axes = vec![uniform_axis(0.0, 1.0, 5), uniform_axis(0.0, 1.0, 5)];
        let opts = MdOptions {
            side: Side::Left,
            substeps: 50,
            ..MdOptions::default()
        };
        let sol = solve_linear_md(&f, &psi0, &axes, &opts).unwrap();
        assert!(sol.report.warnings.is_empty());
        for i in 0..sol.grid.len() {
            let x = sol.grid.point(i);
            let want = &(&l1.scale_real(x[0]) + &l2.scale_real(x[1])).matexp() * &psi0;
            assert!(sol.grid.values()[i].max_abs_diff(&want) < 1e-8);
        }
    }
}
