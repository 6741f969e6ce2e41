use super::{relative_diff, solve_direct, RiccatiProblem};
use crate::algebra::CMatrix;
use crate::error::{Error, Result};
use crate::flow::{derivative_along, FieldOnGrid, MatrixField, ResidualReport, Stencil};

fn nan_matrix(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| num_complex::Complex64::new(f64::NAN, 0.0))
}

/// Gauge transformation `λ'_i = χ λ_i χ⁻¹ − ∂_i χ χ⁻¹`, mapping solutions of
/// `∂ψ = ψλ` to `ψχ⁻¹`. Component `i` of `λ` is paired with coordinate `i`.
/// Evaluating where `χ` is singular fails with an evaluation error.
pub fn gauge_transform(lambda: &MatrixField, chi: &MatrixField) -> Result<MatrixField> {
    if chi.dim_in() != lambda.dim_in() || chi.shape() != lambda.shape() {
        return Err(Error::Shape("gauge field does not match the coefficient field".into()));
    }
    if lambda.components() > lambda.dim_in() {
        return Err(Error::Shape("more components than coordinates".into()));
    }
    let n = lambda.shape().0;
    let (lambda, chi) = (lambda.clone(), chi.clone());
    Ok(MatrixField::multi(lambda.dim_in(), lambda.components(), lambda.shape(), move |i, x| {
        let value = || -> Result<CMatrix> {
            let c = chi.at(x)?;
            let cinv = c.inverse()?;
            let dc = chi.partial(0, i, x)?;
            Ok(&(&(&c * &lambda.eval(i, x)?) * &cinv) - &(&dc * &cinv))
        };
        value().unwrap_or_else(|_| nan_matrix(n))
    }))
}

/// Gauge transformation with `χ` given by samples; `∂χ` is taken by finite
/// differences on the sample grid. Returns one grid per component of `λ`.
pub fn gauge_transform_sampled(
    lambda: &MatrixField,
    chi: &FieldOnGrid,
    stencil: Stencil,
) -> Result<Vec<FieldOnGrid>> {
    if chi.dims() != lambda.dim_in() {
        return Err(Error::Shape("sample grid does not match the field".into()));
    }
    let inverses = chi
        .values()
        .iter()
        .map(|c| c.inverse())
        .collect::<Result<Vec<_>>>()?;
    (0..lambda.components())
        .map(|i| {
            let dchi = derivative_along(chi.axes(), chi.values(), i, stencil)?;
            let values = (0..chi.len())
                .map(|k| {
                    let x = chi.point(k);
                    let c = &chi.values()[k];
                    let l = lambda.eval(i, &x)?;
                    Ok(&(&(c * &l) * &inverses[k]) - &(&dchi[k] * &inverses[k]))
                })
                .collect::<Result<Vec<_>>>()?;
            FieldOnGrid::new(chi.axes().to_vec(), values)
        })
        .collect()
}

/// Solves `p` and its gauge transform by a grade-zero `χ`, then compares the
/// transformed solution against `χ ψ_{>0} χ⁻¹`.
pub fn covariance_check(
    p: &RiccatiProblem,
    chi: &MatrixField,
    interval: (f64, f64),
    steps: usize,
) -> Result<ResidualReport> {
    let x0 = [interval.0];
    let c0 = chi.at(&x0)?;
    let defect = p.ctx.off_diagonal_defect(&c0)?;
    if defect > super::STRUCTURE_TOL {
        return Err(Error::InvalidInput(format!("gauge element is not block diagonal (defect {defect:e})")));
    }
    let base = solve_direct(p, interval, steps)?;
    let transformed = RiccatiProblem::new(
        p.ctx.clone(),
        gauge_transform(&p.field, chi)?,
        &(&c0 * &p.initial) * &c0.inverse()?,
        p.component,
    )?;
    let moved = solve_direct(&transformed, interval, steps)?;
    let mut expected = Vec::with_capacity(base.len());
    let mut worst_defect = 0.0f64;
    for (k, y) in base.values().iter().enumerate() {
        let c = chi.at(&base.coordinate(k))?;
        worst_defect = worst_defect.max(p.ctx.off_diagonal_defect(&c)?);
        expected.push(&(&c * y) * &c.inverse()?);
    }
    let mut report = ResidualReport::default();
    report.insert("covariance", relative_diff(&expected, moved.values()));
    report.insert("gauge-block-defect", worst_defect);
    report.note("steps", steps);
    Ok(report)
}
