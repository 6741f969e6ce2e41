//! Riccati-type equations `∂ψ_{>0} ψ_{>0}⁻¹ = (ψ_{>0} λ ψ_{>0}⁻¹)_{>0}` and
//! their lower-triangular mirror, solved directly or through the linear flow
//! `∂ψ = ψλ` followed by a Gauss decomposition.

mod gauge;
mod solve;

use serde::{Deserialize, Serialize};

use crate::algebra::{unit_triangular_inverse, CMatrix, GradedContext, Part};
use crate::error::{Error, Result};
use crate::flow::{FieldOnGrid, MatrixField, Trajectory};

pub use gauge::{covariance_check, gauge_transform, gauge_transform_sampled};
pub use solve::{
    solve_by_linearization, solve_by_linearization_from, solve_by_linearization_md, solve_by_linearization_with,
    solve_direct, solve_direct_md, substitution_residual, DIVERGENCE_NORM,
};

/// Which nilpotent factor of the flow is tracked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    /// `ψ_{>0}` from `ψ = ψ_{<0} ψ_0 ψ_{>0}`.
    #[default]
    Upper,
    /// `ψ_{<0}` from `ψ = ψ_{>0} ψ_0 ψ_{<0}`.
    Lower,
}

impl Component {
    pub fn part(self) -> Part {
        match self {
            Component::Upper => Part::Positive,
            Component::Lower => Part::Negative,
        }
    }

    /// Block holding the classical Riccati unknown of a 2-block gradation.
    pub fn riccati_block(self) -> (usize, usize) {
        match self {
            Component::Upper => (0, 1),
            Component::Lower => (1, 0),
        }
    }
}

/// Tolerance on the structural defect of user-supplied initial data.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Initial-value problem for the Riccati-type equation.
#[derive(Clone, Debug)]
pub struct RiccatiProblem {
    pub ctx: GradedContext,
    /// Coefficient field; one component per direction.
    pub field: MatrixField,
    /// Unit block-triangular initial value.
    pub initial: CMatrix,
    pub component: Component,
}

impl RiccatiProblem {
    pub fn new(ctx: GradedContext, field: MatrixField, initial: CMatrix, component: Component) -> Result<Self> {
        let n = ctx.dim();
        if field.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "field is {}x{}, gradation has n = {n}",
                field.shape().0,
                field.shape().1
            )));
        }
        let defect = ctx.unit_triangular_defect(&initial, component.part())?;
        if defect > STRUCTURE_TOL {
            return Err(Error::InvalidInput(format!(
                "initial value is not unit block-triangular (defect {defect:e})"
            )));
        }
        let initial = &CMatrix::identity(n) + &ctx.project(&initial, component.part())?;
        Ok(Self {
            ctx,
            field,
            initial,
            component,
        })
    }

    pub fn upper(ctx: GradedContext, field: MatrixField, initial: CMatrix) -> Result<Self> {
        Self::new(ctx, field, initial, Component::Upper)
    }

    /// Two-block problem with initial value `U(0) = m`.
    pub fn two_block(ctx: GradedContext, field: MatrixField, m: &CMatrix, component: Component) -> Result<Self> {
        if ctx.blocks() != 2 {
            return Err(Error::InvalidInput("two_block needs a 2-block gradation".into()));
        }
        let (r, s) = component.riccati_block();
        let initial = &CMatrix::identity(ctx.dim()) + &ctx.embed(r, s, m)?;
        Self::new(ctx, field, initial, component)
    }
}

/// Tangent of the Riccati-type flow: `P_{>0}(y λ y⁻¹) · y`.
pub fn rhs(ctx: &GradedContext, lambda: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    rhs_component(ctx, lambda, y, Component::Upper)
}

/// As [`rhs`], projecting on the part selected by `component`.
pub fn rhs_component(ctx: &GradedContext, lambda: &CMatrix, y: &CMatrix, component: Component) -> Result<CMatrix> {
    ctx.check_square(lambda)?;
    ctx.check_square(y)?;
    let yinv = unit_triangular_inverse(ctx, y)?;
    let conj = &(y * lambda) * &yinv;
    Ok(&ctx.project(&conj, component.part())? * y)
}

/// Solution samples along a path or on a grid.
#[derive(Clone, Debug, PartialEq)]
pub enum Samples {
    Path(Trajectory),
    Grid(FieldOnGrid),
}

/// Unit block-triangular samples of a Riccati-type solution.
#[derive(Clone, Debug, PartialEq)]
pub struct RiccatiSolution {
    pub ctx: GradedContext,
    pub component: Component,
    pub samples: Samples,
}

impl RiccatiSolution {
    pub fn values(&self) -> &[CMatrix] {
        match &self.samples {
            Samples::Path(t) => &t.values,
            Samples::Grid(g) => g.values(),
        }
    }

    pub fn len(&self) -> usize {
        self.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.values().is_empty()
    }

    pub fn grid(&self) -> FieldOnGrid {
        match &self.samples {
            Samples::Path(t) => t.to_grid(),
            Samples::Grid(g) => g.clone(),
        }
    }

    pub fn coordinate(&self, k: usize) -> Vec<f64> {
        match &self.samples {
            Samples::Path(t) => vec![t.nodes[k]],
            Samples::Grid(g) => g.point(k),
        }
    }

    pub fn last(&self) -> &CMatrix {
        self.values().last().expect("solution has samples")
    }

    /// Block `(r, s)` of every sample.
    pub fn block(&self, r: usize, s: usize) -> Result<Vec<CMatrix>> {
        self.values().iter().map(|v| self.ctx.block_get(v, r, s)).collect()
    }

    /// The Riccati unknown `U` of a 2-block gradation.
    pub fn u(&self) -> Result<Vec<CMatrix>> {
        if self.ctx.blocks() != 2 {
            return Err(Error::InvalidInput("U is defined for 2-block gradations".into()));
        }
        let (r, s) = self.component.riccati_block();
        self.block(r, s)
    }

    /// `max |a − b| / max(1, max |a|)` over all samples.
    pub fn relative_diff(&self, other: &RiccatiSolution) -> f64 {
        relative_diff(self.values(), other.values())
    }
}

pub(crate) fn relative_diff(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    assert_eq!(a.len(), b.len(), "sample counts differ");
    let scale = a.iter().map(CMatrix::norm_max).fold(1.0, f64::max);
    a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max) / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::re;

    fn pseudo(seed: u64, rows: usize, cols: usize) -> CMatrix {
        let mut s = seed;
        CMatrix::from_fn(rows, cols, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            num_complex::Complex64::new(a, b)
        })
    }

    #[test]
    fn nonpositive_lambda_at_identity_has_zero_tangent() {
        let ctx = GradedContext::from_sizes(&[1, 2]).unwrap();
        let lam = ctx.project(&pseudo(1, 3, 3), Part::NonPositive).unwrap();
        assert_eq!(rhs(&ctx, &lam, &CMatrix::identity(3)).unwrap().norm_max(), 0.0);
    }

    #[test]
    fn two_block_rhs_is_matrix_riccati() {
        let ctx = GradedContext::from_sizes(&[2, 3]).unwrap();
        let lam = pseudo(7, 5, 5);
        let u = pseudo(9, 2, 3);
        let y = &CMatrix::identity(5) + &ctx.embed(0, 1, &u).unwrap();
        let t = rhs(&ctx, &lam, &y).unwrap();
        let g = |r, s| ctx.block_get(&lam, r, s).unwrap();
        let (a, b, c, d) = (g(0, 0), g(0, 1), g(1, 0), g(1, 1));
        let want = &(&(&b - &(&a * &u)) + &(&u * &d)) - &(&(&u * &c) * &u);
        assert!(ctx.block_get(&t, 0, 1).unwrap().max_abs_diff(&want) < 1e-14);
        assert_eq!(&ctx.project(&t, Part::NonPositive).unwrap().norm_max(), &0.0);
    }

    #[test]
    fn lower_two_block_rhs() {
        // ∂V = C + VA − DV − VBV for ψ = ψ_{>0} ψ_0 ψ_{<0}.
        let ctx = GradedContext::from_sizes(&[1, 2]).unwrap();
        let lam = pseudo(3, 3, 3);
        let v = pseudo(4, 2, 1);
        let y = &CMatrix::identity(3) + &ctx.embed(1, 0, &v).unwrap();
        let t = rhs_component(&ctx, &lam, &y, Component::Lower).unwrap();
        let g = |r, s| ctx.block_get(&lam, r, s).unwrap();
        let (a, b, c, d) = (g(0, 0), g(0, 1), g(1, 0), g(1, 1));
        let want = &(&(&c + &(&v * &a)) - &(&d * &v)) - &(&(&v * &b) * &v);
        assert!(ctx.block_get(&t, 1, 0).unwrap().max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn three_block_rhs_matches_coupled_system() {
        let ctx = GradedContext::from_sizes(&[1, 2, 2]).unwrap();
        let lam = pseudo(11, 5, 5);
        let g = |r, s| ctx.block_get(&lam, r, s).unwrap();
        let (a11, a22, a33) = (g(0, 0), g(1, 1), g(2, 2));
        let (b12, b13, b23) = (g(0, 1), g(0, 2), g(1, 2));
        let (c21, c31, c32) = (g(1, 0), g(2, 0), g(2, 1));
        let (u12, u13, u23) = (pseudo(12, 1, 2), pseudo(13, 1, 2), pseudo(14, 2, 2));
        let mut y = CMatrix::identity(5);
        ctx.block_set(&mut y, 0, 1, &u12).unwrap();
        ctx.block_set(&mut y, 0, 2, &u13).unwrap();
        ctx.block_set(&mut y, 1, 2, &u23).unwrap();
        let t = rhs(&ctx, &lam, &y).unwrap();
        let d12 = &b12 - &(&a11 * &u12) + &u12 * &a22 + &u13 * &c32 - &u12 * &c21 * &u12 - &u13 * &c31 * &u12;
        let d23 = &b23 - &(&a22 * &u23) + &u23 * &a33 - &c21 * &u13 + &c21 * &u12 * &u23
            - &u23 * &c31 * &u13
            - &u23 * &c32 * &u23
            + &u23 * &c31 * &u12 * &u23;
        let d13 = &b13 - &(&a11 * &u13) + &u13 * &a33 + &u12 * &b23 - &u12 * &c21 * &u13 - &u13 * &c31 * &u13;
        assert!(ctx.block_get(&t, 0, 1).unwrap().max_abs_diff(&d12) < 1e-12);
        assert!(ctx.block_get(&t, 1, 2).unwrap().max_abs_diff(&d23) < 1e-12);
        assert!(ctx.block_get(&t, 0, 2).unwrap().max_abs_diff(&d13) < 1e-12);
    }

    #[test]
    fn problem_validates_structure() {
        let ctx = GradedContext::from_sizes(&[1, 1]).unwrap();
        let f = MatrixField::zero(1, 1, 2);
        let bad = CMatrix::from_real(2, 2, &[1.0, 0.5, 0.1, 1.0]);
        assert!(RiccatiProblem::upper(ctx.clone(), f.clone(), bad).is_err());
        let p = RiccatiProblem::two_block(ctx, f, &CMatrix::scalar(re(2.0)), Component::Lower).unwrap();
        assert_eq!(p.initial, CMatrix::from_real(2, 2, &[1.0, 0.0, 2.0, 1.0]));
    }
}
