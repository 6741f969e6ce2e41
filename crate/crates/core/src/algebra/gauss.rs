//! Generalized Gauss decomposition `a = a_{<0} · a_0 · a_{>0}`.
//!
//! The factorization is computed by peeling off the first block and
//! recursing on the Schur complement:
//!
//! ```text
//! (a_0)_11 = a_11,   (a_{>0})_1* = a_11^{-1} a_1*,   (a_{<0})_*1 = a_*1 a_11^{-1},
//! remainder = a_** − a_*1 a_11^{-1} a_1*
//! ```
//!
//! which reproduces the explicit two- and three-block formulas and extends
//! to any number of blocks. A matrix is accepted only if every leading block
//! minor has smallest singular value above `tol · ‖a‖₂`.

use num_complex::Complex64;

use super::{CMatrix, GradedContext};
use crate::error::{Error, Result};

/// Default relative conditioning threshold for leading block minors.
pub const DEFAULT_GAUSS_TOL: f64 = 1e-10;

/// Factors of `a = lower · zero · upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussFactors {
    /// Unit block-lower factor in `G_{<0}`.
    pub lower: CMatrix,
    /// Block-diagonal factor in `G_0`.
    pub zero: CMatrix,
    /// Unit block-upper factor in `G_{>0}`.
    pub upper: CMatrix,
}

impl GaussFactors {
    pub fn reconstruct(&self) -> CMatrix {
        &(&self.lower * &self.zero) * &self.upper
    }

    /// Determinants of the leading block minors through blocks `0..p-1`
    /// (the full determinant excluded).
    pub fn leading_minor_dets(&self, ctx: &GradedContext) -> Result<Vec<Complex64>> {
        let mut acc = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(ctx.blocks() - 1);
        for r in 0..ctx.blocks() - 1 {
            acc *= ctx.block_get(&self.zero, r, r)?.det()?;
            out.push(acc);
        }
        Ok(out)
    }
}

/// Factors of the opposite decomposition `a = upper · zero · lower`.
#[derive(Clone, Debug, PartialEq)]
pub struct OppositeFactors {
    pub upper: CMatrix,
    pub zero: CMatrix,
    pub lower: CMatrix,
}

impl OppositeFactors {
    pub fn reconstruct(&self) -> CMatrix {
        &(&self.upper * &self.zero) * &self.lower
    }
}

/// Checks that every leading block minor of `a` (including `a` itself) is
/// well conditioned relative to `tol · ‖a‖₂`.
pub fn check_decomposable(ctx: &GradedContext, a: &CMatrix, tol: f64) -> Result<()> {
    ctx.check_square(a)?;
    if !a.is_finite() {
        return Err(Error::Evaluation("non-finite matrix passed to Gauss decomposition".into()));
    }
    let full = a.singular_values();
    let norm = full.first().copied().unwrap_or(0.0);
    let threshold = tol * norm;
    for k in 0..ctx.blocks() {
        let size = ctx.offset(k + 1);
        let sigma_min = if k + 1 == ctx.blocks() {
            full.last().copied().unwrap_or(0.0)
        } else {
            let minor = a.submatrix(0, 0, size, size);
            minor.singular_values().last().copied().unwrap_or(0.0)
        };
        if !(sigma_min > threshold) {
            return Err(Error::NotDecomposable {
                block: k,
                sigma_min,
                threshold,
            });
        }
    }
    Ok(())
}

/// Generalized Gauss decomposition for an arbitrary block gradation.
pub fn gauss_decompose(ctx: &GradedContext, a: &CMatrix, tol: f64) -> Result<GaussFactors> {
    check_decomposable(ctx, a, tol)?;
    let n = ctx.dim();
    let p = ctx.blocks();
    let mut lower = CMatrix::identity(n);
    let mut zero = CMatrix::zeros(n, n);
    let mut upper = CMatrix::identity(n);
    let mut schur = a.clone();
    for r in 0..p - 1 {
        let o = ctx.offset(r);
        let nr = ctx.sizes()[r];
        let rest = n - o - nr;
        let a11 = schur.submatrix(0, 0, nr, nr);
        let a12 = schur.submatrix(0, nr, nr, rest);
        let a21 = schur.submatrix(nr, 0, rest, nr);
        let a22 = schur.submatrix(nr, nr, rest, rest);
        let a11_inv = a11.inverse().map_err(|_| Error::NotDecomposable {
            block: r,
            sigma_min: 0.0,
            threshold: tol,
        })?;
        let l21 = &a21 * &a11_inv;
        let u12 = &a11_inv * &a12;
        zero.set_submatrix(o, o, &a11);
        lower.set_submatrix(o + nr, o, &l21);
        upper.set_submatrix(o, o + nr, &u12);
        schur = &a22 - &(&l21 * &a12);
    }
    let last = ctx.offset(p - 1);
    zero.set_submatrix(last, last, &schur);
    Ok(GaussFactors { lower, zero, upper })
}

/// Decomposition with the factor order reversed: `a = upper · zero · lower`.
///
/// Obtained by reversing the block order, decomposing, and reversing back.
/// A failing minor is reported with its block index in the original order.
pub fn gauss_decompose_opposite(ctx: &GradedContext, a: &CMatrix, tol: f64) -> Result<OppositeFactors> {
    let rev = ctx.reversed();
    let p = ctx.blocks();
    let b = ctx.reverse_blocks(a)?;
    let f = gauss_decompose(&rev, &b, tol).map_err(|e| match e {
        Error::NotDecomposable {
            block,
            sigma_min,
            threshold,
        } => Error::NotDecomposable {
            block: p - 1 - block,
            sigma_min,
            threshold,
        },
        other => other,
    })?;
    Ok(OppositeFactors {
        upper: rev.reverse_blocks(&f.lower)?,
        zero: rev.reverse_blocks(&f.zero)?,
        lower: rev.reverse_blocks(&f.upper)?,
    })
}

/// Watches Gauss decompositions along a sampled path and flags the path
/// crossing the non-decomposable set between consecutive samples.
///
/// A leading-minor determinant that rotates by more than a quarter turn
/// between samples (`Re(d_new · conj(d_old)) < 0`) passed within one step
/// of zero; on real data this is exactly a sign change.
#[derive(Debug, Default, Clone)]
pub struct PathMonitor {
    previous: Option<Vec<Complex64>>,
}

impl PathMonitor {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records the minor determinants of a new sample; returns the block whose
    /// minor crossed zero since the previous sample, if any.
    pub fn observe(&mut self, dets: Vec<Complex64>) -> Option<usize> {
        let crossed = self.previous.as_ref().and_then(|prev| {
            prev.iter()
                .zip(&dets)
                .position(|(old, new)| (new * old.conj()).re < 0.0)
        });
        self.previous = Some(dets);
        crossed
    }

    /// Convenience wrapper for a single scalar quantity.
    pub fn observe_scalar(&mut self, d: Complex64) -> bool {
        self.observe(vec![d]).is_some()
    }
}
