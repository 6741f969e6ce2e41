use num_complex::Complex64;

use super::{rhs_component, Component, RiccatiProblem, RiccatiSolution, Samples};
use crate::algebra::{
    gauss_decompose, gauss_decompose_opposite, CMatrix, GradedContext, PathMonitor, DEFAULT_GAUSS_TOL,
};
use crate::error::{Error, Result};
use crate::flow::{
    derivative_along, solve_linear_1d, solve_linear_md, staircase, uniform_axis, FieldOnGrid, MatrixField,
    MdOptions, Method, ResidualReport, Side, Stencil, Trajectory,
};

/// Direct integration stops once `‖ψ_{>0}‖_max` exceeds this value.
pub const DIVERGENCE_NORM: f64 = 1e12;

fn diverged(x: &[f64], dir: usize, at: f64, last: &CMatrix) -> Error {
    let mut coordinate = x.to_vec();
    coordinate[dir] = at;
    Error::Divergence {
        coordinate,
        last_state: Box::new(last.clone()),
    }
}

/// One RK4 step of the Riccati-type flow along `dir`, with divergence
/// detection: a non-finite or huge state, or a step whose increment exceeds
/// the size of the state (the solution is escaping faster than the grid can
/// resolve).
fn riccati_step(
    p: &RiccatiProblem,
    comp: usize,
    dir: usize,
    x: &[f64],
    h: f64,
    y: &CMatrix,
) -> Result<CMatrix> {
    let n = p.ctx.dim();
    let part = p.component.part();
    let mut pt = x.to_vec();
    let mut k = |dx: f64, state: &CMatrix| -> Result<CMatrix> {
        pt[dir] = x[dir] + dx;
        let lam = p.field.eval(comp, &pt)?;
        rhs_component(&p.ctx, &lam, state, p.component)
    };
    let k1 = k(0.0, y)?;
    let k2 = k(0.5 * h, &(y + &k1.scale_real(0.5 * h)))?;
    let k3 = k(0.5 * h, &(y + &k2.scale_real(0.5 * h)))?;
    let k4 = k(h, &(y + &k3.scale_real(h)))?;
    let size = y.norm_max();
    let incr = [&k1, &k2, &k3, &k4].iter().map(|k| k.norm_max()).fold(0.0, f64::max) * h.abs();
    let next = y + &(&(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0)).scale_real(h / 6.0);
    if !next.is_finite() || !incr.is_finite() || incr > 1.0 + size || next.norm_max() > DIVERGENCE_NORM {
        return Err(diverged(x, dir, x[dir] + h, y));
    }
    Ok(&CMatrix::identity(n) + &p.ctx.project(&next, part)?)
}

fn check_dims(p: &RiccatiProblem, d: usize) -> Result<()> {
    if p.field.dim_in() != d || p.field.components() != d {
        return Err(Error::Shape(format!(
            "{d}-dimensional solve needs a field with {d} coordinates and components, got {} and {}",
            p.field.dim_in(),
            p.field.components()
        )));
    }
    Ok(())
}

/// RK4 integration of the Riccati-type equation on `steps` uniform steps.
pub fn solve_direct(p: &RiccatiProblem, interval: (f64, f64), steps: usize) -> Result<RiccatiSolution> {
    check_dims(p, 1)?;
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    let nodes = uniform_axis(interval.0, interval.1, steps + 1);
    let h = (interval.1 - interval.0) / steps as f64;
    let mut values = Vec::with_capacity(steps + 1);
    values.push(p.initial.clone());
    for k in 0..steps {
        let next = riccati_step(p, 0, 0, &[nodes[k]], h, &values[k])?;
        values.push(next);
    }
    Ok(RiccatiSolution {
        ctx: p.ctx.clone(),
        component: p.component,
        samples: Samples::Path(Trajectory {
            nodes,
            values,
            side: Side::Right,
        }),
    })
}

/// Staircase RK4 integration of the multidimensional system
/// `∂_i ψ_{>0} ψ_{>0}⁻¹ = (ψ_{>0} λ_i ψ_{>0}⁻¹)_{>0}` from the grid origin.
pub fn solve_direct_md(
    p: &RiccatiProblem,
    axes: &[Vec<f64>],
    order: Option<&[usize]>,
    substeps: usize,
) -> Result<RiccatiSolution> {
    check_dims(p, axes.len())?;
    let default: Vec<usize> = (0..axes.len()).collect();
    let order = order.unwrap_or(&default);
    let values = staircase(axes, order, substeps, p.initial.clone(), |dir, x, h, y| {
        riccati_step(p, dir, dir, x, h, y)
    })?;
    Ok(RiccatiSolution {
        ctx: p.ctx.clone(),
        component: p.component,
        samples: Samples::Grid(FieldOnGrid::new(axes.to_vec(), values)?),
    })
}

/// The tracked factor of `psi` together with the determinants of the
/// leading block minors (trailing minors for the opposite decomposition).
fn factor(ctx: &GradedContext, psi: &CMatrix, component: Component) -> Result<(CMatrix, Vec<Complex64>)> {
    match component {
        Component::Upper => {
            let f = gauss_decompose(ctx, psi, DEFAULT_GAUSS_TOL)?;
            let dets = f.leading_minor_dets(ctx)?;
            Ok((f.upper, dets))
        }
        Component::Lower => {
            let f = gauss_decompose_opposite(ctx, psi, DEFAULT_GAUSS_TOL)?;
            let mut acc = Complex64::new(1.0, 0.0);
            let mut dets = Vec::with_capacity(ctx.blocks() - 1);
            for r in (1..ctx.blocks()).rev() {
                acc *= ctx.block_get(&f.zero, r, r)?.det()?;
                dets.push(acc);
            }
            Ok((f.lower, dets))
        }
    }
}

fn relabel(e: Error, node: usize, coordinate: Vec<f64>) -> Error {
    match e {
        Error::NotDecomposable { block, .. } => Error::BlowupAtNode { node, coordinate, block },
        other => other,
    }
}

/// Solves the linear flow `dψ/dx = ψλ`, `ψ(lo) = initial`, with RK4 and
/// Gauss-decomposes every sample.
pub fn solve_by_linearization(p: &RiccatiProblem, interval: (f64, f64), steps: usize) -> Result<RiccatiSolution> {
    solve_by_linearization_with(p, interval, steps, Method::Rk4)
}

pub fn solve_by_linearization_with(
    p: &RiccatiProblem,
    interval: (f64, f64),
    steps: usize,
    method: Method,
) -> Result<RiccatiSolution> {
    check_dims(p, 1)?;
    linearize(&p.ctx, &p.field, &p.initial, p.component, interval, steps, method)
}

/// Linearization started from an arbitrary decomposable element `a`; only
/// its nilpotent factor influences the result.
pub fn solve_by_linearization_from(
    ctx: &GradedContext,
    field: &MatrixField,
    a: &CMatrix,
    component: Component,
    interval: (f64, f64),
    steps: usize,
) -> Result<RiccatiSolution> {
    if field.dim_in() != 1 {
        return Err(Error::Shape("1D linearization needs a field of one coordinate".into()));
    }
    linearize(ctx, field, a, component, interval, steps, Method::Rk4)
}

fn linearize(
    ctx: &GradedContext,
    field: &MatrixField,
    a: &CMatrix,
    component: Component,
    interval: (f64, f64),
    steps: usize,
    method: Method,
) -> Result<RiccatiSolution> {
    let flow = solve_linear_1d(field, a, interval, steps, Side::Right, method)?;
    let mut monitor = PathMonitor::new();
    let mut values = Vec::with_capacity(flow.values.len());
    for (k, psi) in flow.values.iter().enumerate() {
        let coordinate = vec![flow.nodes[k]];
        let (f, dets) = factor(ctx, psi, component).map_err(|e| relabel(e, k, coordinate.clone()))?;
        if let Some(block) = monitor.observe(dets) {
            let block = match component {
                Component::Upper => block,
                Component::Lower => ctx.blocks() - 1 - block,
            };
            return Err(Error::BlowupAtNode {
                node: k,
                coordinate,
                block,
            });
        }
        values.push(f);
    }
    Ok(RiccatiSolution {
        ctx: ctx.clone(),
        component,
        samples: Samples::Path(Trajectory {
            nodes: flow.nodes,
            values,
            side: Side::Right,
        }),
    })
}

/// Multidimensional linearization: `∂_i ψ = ψ λ_i` on the grid, then a Gauss
/// decomposition at every grid point.
pub fn solve_by_linearization_md(
    p: &RiccatiProblem,
    axes: &[Vec<f64>],
    substeps: usize,
) -> Result<RiccatiSolution> {
    check_dims(p, axes.len())?;
    let options = MdOptions {
        substeps,
        curvature_gate: None,
        ..MdOptions::default()
    };
    let flow = solve_linear_md(&p.field, &p.initial, axes, &options)?.grid;
    let values = flow
        .values()
        .iter()
        .enumerate()
        .map(|(k, psi)| {
            factor(&p.ctx, psi, p.component)
                .map(|(f, _)| f)
                .map_err(|e| relabel(e, k, flow.point(k)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RiccatiSolution {
        ctx: p.ctx.clone(),
        component: p.component,
        samples: Samples::Grid(FieldOnGrid::new(axes.to_vec(), values)?),
    })
}

/// Finite-difference residual of the Riccati-type equation on a solution:
/// `max ‖∂_i y − P(y λ_i y⁻¹) y‖` over interior samples, per direction.
pub fn substitution_residual(
    field: &MatrixField,
    sol: &RiccatiSolution,
    stencil: Stencil,
) -> Result<ResidualReport> {
    let grid = sol.grid();
    let d = grid.dims();
    if field.dim_in() != d || field.components() != d {
        return Err(Error::Shape("field does not match the solution grid".into()));
    }
    let mut report = ResidualReport::default();
    let interior = grid.interior_indices(stencil.width(), &(0..d).collect::<Vec<_>>());
    for i in 0..d {
        let deriv = derivative_along(grid.axes(), grid.values(), i, stencil)?;
        let mut worst = 0.0f64;
        for &k in &interior {
            let x = grid.point(k);
            let y = &grid.values()[k];
            let t = rhs_component(&sol.ctx, &field.eval(i, &x)?, y, sol.component)?;
            worst = worst.max(deriv[k].max_abs_diff(&t));
        }
        report.insert(format!("riccati[{i}]"), worst);
    }
    report.note("stencil", format!("{stencil:?}"));
    report.note("interior-points", interior.len());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{re, Part};

    fn scalar_problem(a: f64, b: f64, c: f64, d: f64, m: f64) -> RiccatiProblem {
        let ctx = GradedContext::from_sizes(&[1, 1]).unwrap();
        let lam = CMatrix::from_real(2, 2, &[a, b, c, d]);
        RiccatiProblem::two_block(ctx, MatrixField::constant(1, lam), &CMatrix::scalar(re(m)), Component::Upper)
            .unwrap()
    }

    #[test]
    fn tanh_both_methods() {
        let p = scalar_problem(0.0, 1.0, 1.0, 0.0, 0.0);
        for sol in [
            solve_direct(&p, (0.0, 1.0), 1000).unwrap(),
            solve_by_linearization(&p, (0.0, 1.0), 1000).unwrap(),
        ] {
            let u = sol.u().unwrap();
            assert!((u.last().unwrap()[(0, 0)].re - 0.761594155955765).abs() < 1e-8);
        }
    }

    #[test]
    fn hyperbolic_decay() {
        let p = scalar_problem(0.0, 0.0, 1.0, 0.0, 1.0);
        let sol = solve_direct(&p, (0.0, 2.0), 400).unwrap();
        let u = sol.u().unwrap();
        if let Samples::Path(t) = &sol.samples {
            for (x, v) in t.nodes.iter().zip(&u) {
                assert!((v[(0, 0)].re - 1.0 / (1.0 + x)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn zero_is_fixed_point() {
        let ctx = GradedContext::from_sizes(&[2, 1]).unwrap();
        let f = MatrixField::new(1, (3, 3), |x| {
            CMatrix::from_real(3, 3, &[x[0], 0.0, 0.0, 1.0, -x[0], 0.0, 2.0, x[0] * x[0], 0.5])
        });
        let p = RiccatiProblem::upper(ctx, f, CMatrix::identity(3)).unwrap();
        let sol = solve_direct(&p, (0.0, 1.0), 50).unwrap();
        assert!(sol.values().iter().all(|v| v == &CMatrix::identity(3)));
    }

    #[test]
    fn blowup_is_located_consistently() {
        // U' = −U², U(0) = −1: U = −1/(1 − x) escapes at x = 1.
        let p = scalar_problem(0.0, 0.0, 1.0, 0.0, -1.0);
        let steps = 300;
        let h = 2.0 / steps as f64;
        let direct = match solve_direct(&p, (0.0, 2.0), steps) {
            Err(Error::Divergence { coordinate, .. }) => coordinate[0],
            other => panic!("expected divergence, got {other:?}"),
        };
        let lin = match solve_by_linearization(&p, (0.0, 2.0), steps) {
            Err(Error::BlowupAtNode { coordinate, block, .. }) => {
                assert_eq!(block, 0);
                coordinate[0]
            }
            other => panic!("expected blow-up, got {other:?}"),
        };
        assert!((direct - 1.0).abs() <= 2.0 * h, "direct at {direct}");
        assert!((lin - direct).abs() <= 2.0 * h, "linearization at {lin}");
    }

    #[test]
    fn structure_is_exact() {
        let ctx = GradedContext::from_sizes(&[1, 1, 1]).unwrap();
        let f = MatrixField::new(1, (3, 3), |x| {
            CMatrix::from_fn(3, 3, |i, j| re(((i * 3 + j) as f64 * 0.1 + x[0]).sin() * 0.5))
        });
        let p = RiccatiProblem::upper(ctx.clone(), f, CMatrix::identity(3)).unwrap();
        let sol = solve_direct(&p, (0.0, 1.0), 100).unwrap();
        for v in sol.values() {
            assert_eq!(ctx.unit_triangular_defect(v, Part::Positive).unwrap(), 0.0);
        }
        let lin = solve_by_linearization(&p, (0.0, 1.0), 100).unwrap();
        assert!(sol.relative_diff(&lin) < 1e-8);
        let res = substitution_residual(&p.field, &sol, Stencil::Central4).unwrap();
        assert!(res.max_residual() < 1e-6);
    }

    #[test]
    fn folded_initial_element_gives_same_factor() {
        let ctx = GradedContext::from_sizes(&[1, 2]).unwrap();
        let f = MatrixField::new(1, (3, 3), |x| {
            CMatrix::from_fn(3, 3, |i, j| re(((i + 2 * j) as f64 + x[0]).cos() * 0.3))
        });
        let upper = CMatrix::from_real(3, 3, &[1.0, 0.2, -0.4, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let lower = CMatrix::from_real(3, 3, &[1.0, 0.0, 0.0, 0.7, 1.0, 0.0, -0.3, 0.0, 1.0]);
        let zero = CMatrix::from_real(3, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.0, -0.5, 1.5]);
        let a = &(&lower * &zero) * &upper;
        let p = RiccatiProblem::upper(ctx.clone(), f.clone(), upper).unwrap();
        let s1 = solve_by_linearization(&p, (0.0, 1.0), 100).unwrap();
        let s2 = solve_by_linearization_from(&ctx, &f, &a, Component::Upper, (0.0, 1.0), 100).unwrap();
        assert!(s1.relative_diff(&s2) < 1e-12);
    }

    #[test]
    fn lower_component_methods_agree() {
        let ctx = GradedContext::from_sizes(&[2, 1]).unwrap();
        let f = MatrixField::new(1, (3, 3), |x| {
            CMatrix::from_fn(3, 3, |i, j| re(((i * 2 + j) as f64 * 0.7 - x[0]).sin() * 0.4))
        });
        let init = CMatrix::from_real(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.3, -0.2, 1.0]);
        let p = RiccatiProblem::new(ctx, f, init, Component::Lower).unwrap();
        let a = solve_direct(&p, (0.0, 1.0), 200).unwrap();
        let b = solve_by_linearization(&p, (0.0, 1.0), 200).unwrap();
        assert!(a.relative_diff(&b) < 1e-8);
    }
}
