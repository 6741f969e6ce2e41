//! Finite-difference residuals of the WZNW and Toda equations on grids over
//! `R^{2d}`. Max-norms are taken over interior nodes only.

use crate::algebra::{gauss_decompose, CMatrix, GradedContext, Part, DEFAULT_GAUSS_TOL};
use crate::error::{Error, Result};
use crate::flow::{derivative_along, FieldOnGrid, MatrixField, ResidualReport, Stencil};

struct GridOps<'a> {
    axes: &'a [Vec<f64>],
    stencil: Stencil,
    interior: Vec<usize>,
}

impl<'a> GridOps<'a> {
    fn new(grid: &'a FieldOnGrid, stencil: Stencil) -> Result<Self> {
        if grid.dims() % 2 != 0 {
            return Err(Error::Shape("grid over R^{2d} needs an even number of axes".into()));
        }
        let all: Vec<usize> = (0..grid.dims()).collect();
        Ok(Self {
            axes: grid.axes(),
            stencil,
            interior: grid.interior_indices(stencil.width(), &all),
        })
    }

    fn d(&self, values: &[CMatrix], dir: usize) -> Result<Vec<CMatrix>> {
        derivative_along(self.axes, values, dir, self.stencil)
    }

    fn max(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.interior.iter().map(|&k| f(k)).fold(0.0, f64::max)
    }
}

fn inverses(values: &[CMatrix]) -> Result<Vec<CMatrix>> {
    values
        .iter()
        .map(|v| v.inverse().map_err(|_| Error::Singular("singular sample on the grid".into())))
        .collect()
}

fn sample(field: &MatrixField, grid: &FieldOnGrid) -> Result<Vec<Vec<CMatrix>>> {
    let points = grid.points();
    (0..field.components())
        .map(|i| points.iter().map(|x| field.eval(i, x)).collect())
        .collect()
}

fn product(a: &[CMatrix], b: &[CMatrix]) -> Vec<CMatrix> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn finish(mut report: ResidualReport, total: &str, ops: &GridOps) -> ResidualReport {
    let worst = report.max_residual();
    report.insert(total, worst);
    report.note("stencil", format!("{:?}", ops.stencil));
    report.note("interior-points", ops.interior.len());
    report
}

/// Residuals of the three multidimensional Toda equations for `γ`:
/// `∂_{-i}(γ c_{-j} γ⁻¹) − ∂_{-j}(γ c_{-i} γ⁻¹)`,
/// `∂_{+j}(γ⁻¹ ∂_{-i} γ) − [c_{-i}, γ⁻¹ c_{+j} γ]`,
/// `∂_{+i}(γ⁻¹ c_{+j} γ) − ∂_{+j}(γ⁻¹ c_{+i} γ)`.
pub fn toda_residual(
    gamma: &FieldOnGrid,
    c_minus: &MatrixField,
    c_plus: &MatrixField,
    stencil: Stencil,
) -> Result<ResidualReport> {
    let ops = GridOps::new(gamma, stencil)?;
    let d = gamma.dims() / 2;
    let g = gamma.values();
    let gi = inverses(g)?;
    let cm = sample(c_minus, gamma)?;
    let cp = sample(c_plus, gamma)?;
    let phi: Vec<Vec<CMatrix>> = cm
        .iter()
        .map(|c| (0..g.len()).map(|k| &(&g[k] * &c[k]) * &gi[k]).collect())
        .collect();
    let theta: Vec<Vec<CMatrix>> = cp
        .iter()
        .map(|c| (0..g.len()).map(|k| &(&gi[k] * &c[k]) * &g[k]).collect())
        .collect();
    let mut report = ResidualReport::default();
    let (mut r26, mut r27, mut r28) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..d {
        for j in i + 1..d {
            let a = ops.d(&phi[j], i)?;
            let b = ops.d(&phi[i], j)?;
            r26 = r26.max(ops.max(|k| a[k].max_abs_diff(&b[k])));
            let a = ops.d(&theta[j], d + i)?;
            let b = ops.d(&theta[i], d + j)?;
            r28 = r28.max(ops.max(|k| a[k].max_abs_diff(&b[k])));
        }
        let omega = product(&gi, &ops.d(g, i)?);
        for j in 0..d {
            let lhs = ops.d(&omega, d + j)?;
            r27 = r27.max(ops.max(|k| lhs[k].max_abs_diff(&cm[i][k].commutator(&theta[j][k]))));
        }
    }
    report.insert("toda-minus", r26);
    report.insert("toda-mixed", r27);
    report.insert("toda-plus", r28);
    Ok(finish(report, "toda", &ops))
}

/// Residuals of `∂_{+j}(ψ⁻¹ ∂_{-i} ψ) = 0`, its equivalent form
/// `∂_{-i}(∂_{+j} ψ ψ⁻¹) = 0`, and the zero-curvature conditions of the
/// currents `ι_{-i} = ψ⁻¹ ∂_{-i} ψ`, `ι_{+j} = −∂_{+j} ψ ψ⁻¹`.
pub fn wznw_residual(psi: &FieldOnGrid, stencil: Stencil) -> Result<ResidualReport> {
    let ops = GridOps::new(psi, stencil)?;
    let d = psi.dims() / 2;
    let p = psi.values();
    let pi = inverses(p)?;
    let iota_m: Vec<Vec<CMatrix>> = (0..d).map(|i| Ok(product(&pi, &ops.d(p, i)?))).collect::<Result<_>>()?;
    let iota_p: Vec<Vec<CMatrix>> = (0..d)
        .map(|j| Ok(product(&ops.d(p, d + j)?, &pi).into_iter().map(|m| -m).collect()))
        .collect::<Result<_>>()?;
    let (mut w, mut weq) = (0.0f64, 0.0f64);
    for i in 0..d {
        for j in 0..d {
            let a = ops.d(&iota_m[i], d + j)?;
            w = w.max(ops.max(|k| a[k].norm_max()));
            let b = ops.d(&iota_p[j], i)?;
            weq = weq.max(ops.max(|k| b[k].norm_max()));
        }
    }
    let curvature = |iota: &[Vec<CMatrix>], offset: usize| -> Result<f64> {
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i + 1..d {
                let a = ops.d(&iota[j], offset + i)?;
                let b = ops.d(&iota[i], offset + j)?;
                worst = worst.max(ops.max(|k| (&(&a[k] - &b[k]) + &iota[i][k].commutator(&iota[j][k])).norm_max()));
            }
        }
        Ok(worst)
    };
    let mut report = ResidualReport::default();
    report.insert("wznw", w);
    report.insert("wznw-equivalent", weq);
    report.insert("chirality-minus", w);
    report.insert("chirality-plus", weq);
    report.insert("current-curvature-minus", curvature(&iota_m, 0)?);
    report.insert("current-curvature-plus", curvature(&iota_p, d)?);
    Ok(finish(report, "wznw-max", &ops))
}

/// Reduction constraints on a WZNW solution `ψ` with Toda field `γ`:
/// `(ψ⁻¹ ∂_{-i} ψ)_{<0} = c_{-i}`, `(∂_{+i} ψ ψ⁻¹)_{>0} = −c_{+i}`, their
/// Gauss-factor forms `ψ_0⁻¹ (ψ_{<0}⁻¹ ∂_{-i} ψ_{<0}) ψ_0 = c_{-i}` and
/// `ψ_0 (∂_{+i} ψ_{>0} ψ_{>0}⁻¹) ψ_0⁻¹ = −c_{+i}`, and `ψ_0 = γ`.
pub fn wznw_constraint_residuals(
    ctx: &GradedContext,
    psi: &FieldOnGrid,
    gamma: &FieldOnGrid,
    c_minus: &MatrixField,
    c_plus: &MatrixField,
    stencil: Stencil,
) -> Result<ResidualReport> {
    let ops = GridOps::new(psi, stencil)?;
    let d = psi.dims() / 2;
    let p = psi.values();
    let pi = inverses(p)?;
    let cm = sample(c_minus, psi)?;
    let cp = sample(c_plus, psi)?;
    let mut lower = Vec::with_capacity(p.len());
    let mut zero = Vec::with_capacity(p.len());
    let mut upper = Vec::with_capacity(p.len());
    for (k, v) in p.iter().enumerate() {
        let f = gauss_decompose(ctx, v, DEFAULT_GAUSS_TOL).map_err(|_| Error::NotDecomposableOnGrid {
            points: vec![psi.point(k)],
        })?;
        lower.push(f.lower);
        zero.push(f.zero);
        upper.push(f.upper);
    }
    let li = inverses(&lower)?;
    let zi = inverses(&zero)?;
    let ui = inverses(&upper)?;
    let (mut r19m, mut r19p, mut r21, mut r22) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..d {
        let dm = ops.d(p, i)?;
        let dp = ops.d(p, d + i)?;
        let dl = ops.d(&lower, i)?;
        let du = ops.d(&upper, d + i)?;
        for &k in &ops.interior {
            let a = ctx.project(&(&pi[k] * &dm[k]), Part::Negative)?;
            r19m = r19m.max(a.max_abs_diff(&cm[i][k]));
            let b = ctx.project(&(&dp[k] * &pi[k]), Part::Positive)?;
            r19p = r19p.max((&b + &cp[i][k]).norm_max());
            let c = &(&zi[k] * &(&li[k] * &dl[k])) * &zero[k];
            r21 = r21.max(c.max_abs_diff(&cm[i][k]));
            let e = &(&zero[k] * &(&du[k] * &ui[k])) * &zi[k];
            r22 = r22.max((&e + &cp[i][k]).norm_max());
        }
    }
    let psi0 = zero
        .iter()
        .zip(gamma.values())
        .map(|(a, b)| a.max_abs_diff(b))
        .fold(0.0, f64::max);
    let mut report = ResidualReport::default();
    report.insert("constraint-minus", r19m);
    report.insert("constraint-plus", r19p);
    report.insert("factor-constraint-minus", r21);
    report.insert("factor-constraint-plus", r22);
    let mut report = finish(report, "constraints", &ops);
    report.insert("psi0-vs-gamma", psi0);
    Ok(report)
}

/// Curvature of the connection `ω_{-i} = c_{-i} + γ⁻¹ ∂_{-i} γ`,
/// `ω_{+i} = γ⁻¹ c_{+i} γ` over all pairs of the `2d` directions.
pub fn connection_curvature(
    gamma: &FieldOnGrid,
    c_minus: &MatrixField,
    c_plus: &MatrixField,
    stencil: Stencil,
) -> Result<ResidualReport> {
    let ops = GridOps::new(gamma, stencil)?;
    let d = gamma.dims() / 2;
    let g = gamma.values();
    let gi = inverses(g)?;
    let cm = sample(c_minus, gamma)?;
    let cp = sample(c_plus, gamma)?;
    let mut omega: Vec<Vec<CMatrix>> = Vec::with_capacity(2 * d);
    for (i, c) in cm.iter().enumerate() {
        let dg = ops.d(g, i)?;
        omega.push((0..g.len()).map(|k| &c[k] + &(&gi[k] * &dg[k])).collect());
    }
    for c in &cp {
        omega.push((0..g.len()).map(|k| &(&gi[k] * &c[k]) * &g[k]).collect());
    }
    let mut worst = 0.0f64;
    for a in 0..2 * d {
        for b in a + 1..2 * d {
            let x = ops.d(&omega[b], a)?;
            let y = ops.d(&omega[a], b)?;
            worst = worst.max(ops.max(|k| (&(&x[k] - &y[k]) + &omega[a][k].commutator(&omega[b][k])).norm_max()));
        }
    }
    let mut report = ResidualReport::default();
    report.insert("connection-curvature", worst);
    report.note("stencil", format!("{stencil:?}"));
    report.note("interior-points", ops.interior.len());
    Ok(report)
}
