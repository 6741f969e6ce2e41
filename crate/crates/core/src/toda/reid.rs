//! Integrable multidimensional Riccati-type systems generated by Toda
//! solutions through the Redheffer–Reid fields `λ_{∓i}`.

use super::construct::TodaSolution;
use super::TodaData;
use crate::algebra::{
    gauss_decompose, gauss_decompose_opposite, unit_triangular_inverse, CMatrix, GradedContext, Part, DEFAULT_GAUSS_TOL,
};
use crate::error::{Error, Result};
use crate::flow::{zero_curvature_residual, FieldOnGrid, MatrixField, ResidualReport, Stencil};
use crate::riccati::{substitution_residual, Component, RiccatiSolution, Samples, STRUCTURE_TOL};

/// Redheffer–Reid fields on `R^{2d}`:
/// `λ_{-i} = ξ_+⁻¹ (c_{-i} + γ_-⁻¹ ∂_{-i} γ_-) ξ_+ + ξ_+⁻¹ ∂_{-i} ξ_+` and
/// `λ_{+i} = ξ_-⁻¹ (c_{+i} + γ_+⁻¹ ∂_{+i} γ_+) ξ_- + ξ_-⁻¹ ∂_{+i} ξ_-`.
///
/// `λ_-` is evaluated with the `z^+` coordinates frozen at `base` and `λ_+`
/// with `z^-` frozen, so each is exactly chiral.
#[derive(Clone, Debug)]
pub struct RedhefferReid {
    pub d: usize,
    pub lambda_minus: MatrixField,
    pub lambda_plus: MatrixField,
    pub base: Vec<f64>,
}

impl RedhefferReid {
    /// `λ_-` as a field of the `z^-` coordinates.
    pub fn minus_restricted(&self) -> MatrixField {
        self.lambda_minus.restrict(&(0..self.d).collect::<Vec<_>>(), &self.base)
    }

    /// `λ_+` as a field of the `z^+` coordinates.
    pub fn plus_restricted(&self) -> MatrixField {
        self.lambda_plus.restrict(&(self.d..2 * self.d).collect::<Vec<_>>(), &self.base)
    }

    /// Zero-curvature residuals of `λ_-` and `λ_+` on the chiral sub-grids
    /// of `axes`.
    pub fn zero_curvature(&self, axes: &[Vec<f64>]) -> Result<ResidualReport> {
        let mut report = ResidualReport::default();
        if self.d < 2 {
            report.insert("lambda-curvature-minus", 0.0);
            report.insert("lambda-curvature-plus", 0.0);
            return Ok(report);
        }
        let minus = zero_curvature_residual(&self.minus_restricted(), &axes[..self.d])?;
        let plus = zero_curvature_residual(&self.plus_restricted(), &axes[self.d..])?;
        report.insert("lambda-curvature-minus", minus.max_residual());
        report.insert("lambda-curvature-plus", plus.max_residual());
        Ok(report)
    }

    /// `max |(λ_{-i})_{<0} − c_{-i}|` and `max |(λ_{+i})_{>0} − c_{+i}|` over
    /// the given points.
    pub fn constraint_residual(&self, data: &TodaData, points: &[Vec<f64>]) -> Result<ResidualReport> {
        let ctx = &data.ctx;
        let (mut minus, mut plus) = (0.0f64, 0.0f64);
        for x in points {
            for i in 0..self.d {
                let lm = ctx.project(&self.lambda_minus.eval(i, x)?, Part::Negative)?;
                minus = minus.max(lm.max_abs_diff(&data.c_minus.eval(i, x)?));
                let lp = ctx.project(&self.lambda_plus.eval(i, x)?, Part::Positive)?;
                plus = plus.max(lp.max_abs_diff(&data.c_plus.eval(i, x)?));
            }
        }
        let mut report = ResidualReport::default();
        report.insert("lambda-constraint-minus", minus);
        report.insert("lambda-constraint-plus", plus);
        Ok(report)
    }
}

fn frozen(x: &[f64], base: &[f64], keep: std::ops::Range<usize>) -> Vec<f64> {
    let mut out = base.to_vec();
    out[keep.clone()].copy_from_slice(&x[keep]);
    out
}

fn nan(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| f64::NAN.into())
}

/// Redheffer–Reid fields of the data, frozen at the first node of `axes`.
pub fn redheffer_reid_fields(data: &TodaData, axes: &[Vec<f64>]) -> Result<RedhefferReid> {
    let d = data.d;
    if axes.len() != 2 * d || axes.iter().any(Vec::is_empty) {
        return Err(Error::Shape(format!("grid must have {} non-empty axes", 2 * d)));
    }
    let base: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    let n = data.dim();
    let build = |xi: &MatrixField, gamma: &MatrixField, c: &MatrixField, keep: std::ops::Range<usize>| {
        let (xi, gamma, c, ctx, base) = (xi.clone(), gamma.clone(), c.clone(), data.ctx.clone(), base.clone());
        let offset = keep.start;
        MatrixField::multi(2 * d, d, (n, n), move |i, x| {
            let value = || -> Result<CMatrix> {
                let y = frozen(x, &base, keep.clone());
                let k = offset + i;
                let s = xi.at(&y)?;
                let sinv = unit_triangular_inverse(&ctx, &s)?;
                let g = gamma.at(&y)?;
                let inner = &c.eval(i, &y)? + &(&g.inverse()? * &gamma.partial(0, k, &y)?);
                Ok(&(&(&sinv * &inner) * &s) + &(&sinv * &xi.partial(0, k, &y)?))
            };
            value().unwrap_or_else(|_| nan(n))
        })
    };
    Ok(RedhefferReid {
        d,
        lambda_minus: build(&data.xi_plus, &data.gamma_minus, &data.c_minus, 0..d),
        lambda_plus: build(&data.xi_minus, &data.gamma_plus, &data.c_plus, d..2 * d),
        base,
    })
}

/// Blocks of a 2-block matrix `[[A, B], [C, D]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockComponents {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

/// Blocks of `λ_{-i}` and `λ_{+i}` at `x` for a 2-block gradation, in terms
/// of `γ_∓ = diag(β_{∓1}, β_{∓2})`, `c_{-i} = [[0,0],[X_{-i},0]]`,
/// `c_{+i} = [[0,X_{+i}],[0,0]]`, `ξ = (ξ_+)_{12}` and `η = (ξ_-)_{21}`:
///
/// - `A_- = a_1 − ξX`, `B_- = a_1ξ − ξa_2 − ξXξ + ∂ξ`, `C_- = X`, `D_- = a_2 + Xξ`
/// - `A_+ = b_1 + Xη`, `B_+ = X`, `C_+ = b_2η − ηb_1 − ηXη + ∂η`, `D_+ = b_2 − ηX`
///
/// with `a_k = β_{-k}⁻¹ ∂_{-i} β_{-k}` and `b_k = β_{+k}⁻¹ ∂_{+i} β_{+k}`.
pub fn two_block_components(
    data: &TodaData,
    x: &[f64],
) -> Result<(Vec<BlockComponents>, Vec<BlockComponents>)> {
    let ctx = &data.ctx;
    if ctx.blocks() != 2 {
        return Err(Error::InvalidInput("block components need a 2-block gradation".into()));
    }
    let d = data.d;
    let log_derivs = |gamma: &MatrixField, k: usize| -> Result<(CMatrix, CMatrix)> {
        let g = gamma.at(x)?;
        let dg = gamma.partial(0, k, x)?;
        let blk = |m: &CMatrix, r| ctx.block_get(m, r, r);
        Ok((
            &blk(&g, 0)?.inverse()? * &blk(&dg, 0)?,
            &blk(&g, 1)?.inverse()? * &blk(&dg, 1)?,
        ))
    };
    let xi = ctx.block_get(&data.xi_plus.at(x)?, 0, 1)?;
    let eta = ctx.block_get(&data.xi_minus.at(x)?, 1, 0)?;
    let mut minus = Vec::with_capacity(d);
    let mut plus = Vec::with_capacity(d);
    for i in 0..d {
        let (a1, a2) = log_derivs(&data.gamma_minus, i)?;
        let xm = ctx.block_get(&data.c_minus.eval(i, x)?, 1, 0)?;
        let dxi = ctx.block_get(&data.xi_plus.partial(0, i, x)?, 0, 1)?;
        let xix = &xi * &xm;
        minus.push(BlockComponents {
            a: &a1 - &xix,
            b: &(&(&(&a1 * &xi) - &(&xi * &a2)) - &(&xix * &xi)) + &dxi,
            c: xm.clone(),
            d: &a2 + &(&xm * &xi),
        });
        let (b1, b2) = log_derivs(&data.gamma_plus, d + i)?;
        let xp = ctx.block_get(&data.c_plus.eval(i, x)?, 0, 1)?;
        let deta = ctx.block_get(&data.xi_minus.partial(0, d + i, x)?, 1, 0)?;
        let etax = &eta * &xp;
        plus.push(BlockComponents {
            a: &b1 + &(&xp * &eta),
            b: xp.clone(),
            c: &(&(&(&b2 * &eta) - &(&eta * &b1)) - &(&etax * &eta)) + &deta,
            d: &b2 - &etax,
        });
    }
    Ok((minus, plus))
}

/// Riccati solutions generated by a Toda solution: a `G_{>0}`-valued
/// solution on the `z^-` sub-grid for `λ_-` and a `G_{<0}`-valued one on the
/// `z^+` sub-grid for `λ_+`.
#[derive(Clone, Debug)]
pub struct RiccatiFamily {
    pub minus: RiccatiSolution,
    pub plus: RiccatiSolution,
}

/// Seeds giving, for two blocks,
/// `U_- = (ξ_+)_{12} − β_{-1}⁻¹ (I − m_- (μ_-)_{21})⁻¹ m_- β_{-2}` and
/// `U_+ = (ξ_-)_{21} − β_{+2}⁻¹ m_+ (I − (μ_+)_{12} m_+)⁻¹ β_{+1}`.
pub fn two_block_seeds(ctx: &GradedContext, m_minus: &CMatrix, m_plus: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    if ctx.blocks() != 2 {
        return Err(Error::InvalidInput("two-block seeds need a 2-block gradation".into()));
    }
    let eye = CMatrix::identity(ctx.dim());
    Ok((&eye - &ctx.embed(0, 1, m_minus)?, &eye - &ctx.embed(1, 0, m_plus)?))
}

/// Two-block family with the seeds of [`two_block_seeds`].
pub fn riccati_md_solutions(
    data: &TodaData,
    sol: &TodaSolution,
    m_minus: &CMatrix,
    m_plus: &CMatrix,
) -> Result<RiccatiFamily> {
    let (a, b) = two_block_seeds(&data.ctx, m_minus, m_plus)?;
    riccati_md_solutions_seeded(data, sol, &a, &b)
}

/// Builds the family from `Φ_- = μ_- γ_- ξ_+` and `Φ_+ = μ_+ γ_+ ξ_-`,
/// which satisfy `Φ_∓⁻¹ ∂_{∓i} Φ_∓ = λ_{∓i}`: the minus solution is the
/// upper Gauss factor of `seed_minus · Φ_-` and the plus solution the lower
/// factor of the opposite decomposition of `seed_plus · Φ_+`.
///
/// `seed_minus` must be unit block-upper and `seed_plus` unit block-lower.
/// A node where a factorization fails is reported as [`Error::Blowup`].
pub fn riccati_md_solutions_seeded(
    data: &TodaData,
    sol: &TodaSolution,
    seed_minus: &CMatrix,
    seed_plus: &CMatrix,
) -> Result<RiccatiFamily> {
    let ctx = &data.ctx;
    let d = data.d;
    for (seed, part) in [(seed_minus, Part::Positive), (seed_plus, Part::Negative)] {
        let defect = ctx.unit_triangular_defect(seed, part)?;
        if defect > STRUCTURE_TOL {
            return Err(Error::InvalidInput(format!(
                "seed is not unit block-triangular (defect {defect:e})"
            )));
        }
    }
    let base: Vec<f64> = sol.axes().iter().map(|a| a[0]).collect();
    let lift = |z: &[f64], offset: usize| {
        let mut x = base.clone();
        x[offset..offset + d].copy_from_slice(z);
        x
    };
    let minus = sol.mu_minus.try_map(|z, mu| {
        let x = lift(z, 0);
        let phi = &(mu * &data.gamma_minus.at(&x)?) * &data.xi_plus.at(&x)?;
        let f = gauss_decompose(ctx, &(seed_minus * &phi), DEFAULT_GAUSS_TOL)
            .map_err(|_| Error::Blowup { coordinate: z.to_vec() })?;
        Ok(f.upper)
    })?;
    let plus = sol.mu_plus.try_map(|z, mu| {
        let x = lift(z, d);
        let phi = &(mu * &data.gamma_plus.at(&x)?) * &data.xi_minus.at(&x)?;
        let f = gauss_decompose_opposite(ctx, &(seed_plus * &phi), DEFAULT_GAUSS_TOL)
            .map_err(|_| Error::Blowup { coordinate: z.to_vec() })?;
        Ok(f.lower)
    })?;
    let wrap = |grid: FieldOnGrid, component| RiccatiSolution {
        ctx: ctx.clone(),
        component,
        samples: Samples::Grid(grid),
    };
    Ok(RiccatiFamily {
        minus: wrap(minus, Component::Upper),
        plus: wrap(plus, Component::Lower),
    })
}

/// Finite-difference substitution of the family into its Riccati-type
/// systems, together with the constraints on `λ_∓`.
pub fn riccati_md_substitution(
    data: &TodaData,
    fields: &RedhefferReid,
    family: &RiccatiFamily,
    stencil: Stencil,
) -> Result<ResidualReport> {
    let mut report = ResidualReport::default();
    report.merge("minus ", substitution_residual(&fields.minus_restricted(), &family.minus, stencil)?);
    report.merge("plus ", substitution_residual(&fields.plus_restricted(), &family.plus, stencil)?);
    let d = data.d;
    let lift = |z: Vec<f64>, offset: usize| {
        let mut x = fields.base.clone();
        x[offset..offset + d].copy_from_slice(&z);
        x
    };
    let mut points: Vec<Vec<f64>> = family.minus.grid().points().into_iter().map(|z| lift(z, 0)).collect();
    points.extend(family.plus.grid().points().into_iter().map(|z| lift(z, d)));
    report.merge("", fields.constraint_residual(data, &points)?);
    Ok(report)
}
