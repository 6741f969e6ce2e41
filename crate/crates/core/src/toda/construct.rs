//! Construction of multidimensional Toda solutions from chiral data.

use rayon::prelude::*;

use super::residuals::{toda_residual, wznw_constraint_residuals, wznw_residual};
use super::TodaData;
use crate::algebra::{gauss_decompose, unit_triangular_inverse, CMatrix, Part, DEFAULT_GAUSS_TOL};
use crate::error::{Error, Result};
use crate::flow::{check_axes, solve_linear_md, FieldOnGrid, MdOptions, Method, ResidualReport, Side, Stencil};

/// Options of [`construct_solution`].
#[derive(Clone, Debug, PartialEq)]
pub struct TodaOptions {
    /// Integration steps per grid interval for `μ_∓`.
    pub substeps: usize,
    pub method: Method,
    /// Stencil of the finite-difference residuals.
    pub stencil: Stencil,
    /// Conditioning threshold of the pointwise Gauss decompositions.
    pub gauss_tol: f64,
}

impl Default for TodaOptions {
    fn default() -> Self {
        Self {
            substeps: 8,
            method: Method::Rk4,
            stencil: Stencil::Central4,
            gauss_tol: DEFAULT_GAUSS_TOL,
        }
    }
}

/// Toda field and the intermediate objects of its construction.
///
/// `mu_minus` lives on the `z^-` sub-grid and `mu_plus` on the `z^+`
/// sub-grid; everything else on the full grid over `R^{2d}`.
#[derive(Clone, Debug)]
pub struct TodaSolution {
    pub d: usize,
    pub gamma: FieldOnGrid,
    pub mu_minus: FieldOnGrid,
    pub mu_plus: FieldOnGrid,
    /// Factors of `μ_+⁻¹ μ_- = ν_- η ν_+⁻¹`.
    pub nu_minus: FieldOnGrid,
    pub nu_plus: FieldOnGrid,
    pub eta: FieldOnGrid,
    pub report: ResidualReport,
}

impl TodaSolution {
    /// Flat indices into `mu_minus` and `mu_plus` of a full-grid flat index.
    pub fn split_index(&self, flat: usize) -> (usize, usize) {
        let plus_len = self.mu_plus.len();
        (flat / plus_len, flat % plus_len)
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        self.gamma.axes()
    }
}

/// Builds `γ = γ_+⁻¹ η γ_-` on a grid over `R^{2d}`, where
/// `μ_-⁻¹ ∂_{-i} μ_- = γ_- c_{-i} γ_-⁻¹`, `μ_+⁻¹ ∂_{+i} μ_+ = γ_+ c_{+i} γ_+⁻¹`
/// with `μ_∓ = I` at the first grid node, and `η` is the block-diagonal
/// Gauss factor of `μ_+⁻¹ μ_-`.
///
/// Fails with [`Error::NotDecomposableOnGrid`] listing every node where the
/// Gauss decomposition does not exist.
pub fn construct_solution(data: &TodaData, axes: &[Vec<f64>], options: &TodaOptions) -> Result<TodaSolution> {
    check_axes(axes)?;
    let mut report = ResidualReport::default();
    report.merge("data: ", data.check(axes)?);
    report.merge("", data.require_integrable(axes)?);
    let d = data.d;
    let ctx = &data.ctx;
    let n = ctx.dim();
    let base: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    let md = MdOptions {
        order: None,
        side: Side::Right,
        method: options.method,
        substeps: options.substeps,
        curvature_gate: None,
    };
    let minus = data.minus_coords();
    let plus = data.plus_coords();
    let sub = |coords: &[usize]| coords.iter().map(|&k| axes[k].clone()).collect::<Vec<_>>();
    let mu_minus = solve_linear_md(
        &data.minus_generator().restrict(&minus, &base),
        &CMatrix::identity(n),
        &sub(&minus),
        &md,
    )?
    .grid;
    let mu_plus = solve_linear_md(
        &data.plus_generator().restrict(&plus, &base),
        &CMatrix::identity(n),
        &sub(&plus),
        &md,
    )?
    .grid;
    // The flows keep μ_∓ in G_{<0} and G_{>0} up to rounding.
    let mu_minus = mu_minus.try_map(|_, m| Ok(&CMatrix::identity(n) + &ctx.project(m, Part::Negative)?))?;
    let mu_plus = mu_plus.try_map(|_, m| Ok(&CMatrix::identity(n) + &ctx.project(m, Part::Positive)?))?;
    let mu_plus_inv: Vec<CMatrix> = mu_plus
        .values()
        .iter()
        .map(|m| unit_triangular_inverse(ctx, m))
        .collect::<Result<_>>()?;

    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let plus_len = mu_plus.len();
    let points = FieldOnGrid::from_fn(axes.to_vec(), |_| Ok(CMatrix::zeros(0, 0)))?.points();
    type Node = std::result::Result<(CMatrix, CMatrix, CMatrix, CMatrix), Option<Error>>;
    let nodes: Vec<Node> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let (km, kp) = (flat / plus_len, flat % plus_len);
            let x = &points[flat];
            let a = &mu_plus_inv[kp] * &mu_minus.values()[km];
            let f = match gauss_decompose(ctx, &a, options.gauss_tol) {
                Ok(f) => f,
                Err(Error::NotDecomposable { .. }) => return Err(None),
                Err(e) => return Err(Some(e)),
            };
            let compute = || -> Result<(CMatrix, CMatrix, CMatrix, CMatrix)> {
                let gp_inv = data.gamma_plus.at(x)?.inverse()?;
                let gamma = &(&gp_inv * &f.zero) * &data.gamma_minus.at(x)?;
                let nu_plus = unit_triangular_inverse(ctx, &f.upper)?;
                Ok((gamma, f.lower, nu_plus, f.zero))
            };
            compute().map_err(Some)
        })
        .collect();

    let mut failed = Vec::new();
    let mut gamma = Vec::with_capacity(total);
    let mut nu_minus = Vec::with_capacity(total);
    let mut nu_plus = Vec::with_capacity(total);
    let mut eta = Vec::with_capacity(total);
    for (flat, node) in nodes.into_iter().enumerate() {
        match node {
            Ok((g, l, u, z)) => {
                gamma.push(g);
                nu_minus.push(l);
                nu_plus.push(u);
                eta.push(z);
            }
            Err(None) => failed.push(points[flat].clone()),
            Err(Some(e)) => return Err(e),
        }
    }
    if !failed.is_empty() {
        return Err(Error::NotDecomposableOnGrid { points: failed });
    }
    let gamma = FieldOnGrid::new(axes.to_vec(), gamma)?;
    report.merge("", toda_residual(&gamma, &data.c_minus, &data.c_plus, options.stencil)?);
    report.note("substeps", options.substeps);
    Ok(TodaSolution {
        d,
        mu_minus,
        mu_plus,
        nu_minus: FieldOnGrid::new(axes.to_vec(), nu_minus)?,
        nu_plus: FieldOnGrid::new(axes.to_vec(), nu_plus)?,
        eta: FieldOnGrid::new(axes.to_vec(), eta)?,
        gamma,
        report,
    })
}

/// WZNW solution `ψ = ξ_-⁻¹ γ_+⁻¹ μ_+⁻¹ μ_- γ_- ξ_+` with its residual report.
#[derive(Clone, Debug)]
pub struct WznwReconstruction {
    pub psi: FieldOnGrid,
    pub report: ResidualReport,
}

/// Assembles `ψ` from a Toda solution and checks the WZNW equation, the
/// reduction constraints and `ψ_0 = γ`.
pub fn reconstruct_wznw(sol: &TodaSolution, data: &TodaData, stencil: Stencil) -> Result<WznwReconstruction> {
    let ctx = &data.ctx;
    let mut k = 0usize;
    let psi = sol.gamma.try_map(|x, _| {
        let (km, kp) = sol.split_index(k);
        k += 1;
        let left = &unit_triangular_inverse(ctx, &data.xi_minus.at(x)?)? * &data.gamma_plus.at(x)?.inverse()?;
        let mid = &unit_triangular_inverse(ctx, &sol.mu_plus.values()[kp])? * &sol.mu_minus.values()[km];
        let right = &data.gamma_minus.at(x)? * &data.xi_plus.at(x)?;
        Ok(&(&left * &mid) * &right)
    })?;
    let mut report = wznw_residual(&psi, stencil)?;
    report.merge(
        "",
        wznw_constraint_residuals(ctx, &psi, &sol.gamma, &data.c_minus, &data.c_plus, stencil)?,
    );
    Ok(WznwReconstruction { psi, report })
}
