//! Closed-form solutions of Riccati-type equations for special coefficient
//! families: block-triangular `λ`, `C = B`, constant `B, C`, strictly lower
//! three-block `λ`, and multidimensional nilpotent `λ_i`.

mod nilpotent;
mod quadrature;
mod two_block;

pub use nilpotent::{
    curl_residual, solve_md_nilpotent, solve_md_nilpotent_grid, solve_three_block_nilpotent,
    solve_three_block_nilpotent_path, three_block_trajectory, ThreeBlockNilpotent, ThreeBlockU, CURL_TOL,
};
pub use quadrature::{cumulative_simpson, simpson_panel};
pub use two_block::{
    solve_b_zero, solve_b_zero_path, solve_cb_equal, solve_cb_equal_path, solve_constant_bc, ConstantBC,
    TriangularCoeffs1D, NONDEGENERACY_TOL,
};

use crate::algebra::{CMatrix, PathMonitor};
use crate::error::{Error, Result};

/// Relative smallest-singular-value threshold below which a factor of a
/// closed form counts as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

pub(crate) fn guarded_inverse(m: &CMatrix, x: &[f64]) -> Result<CMatrix> {
    let blowup = || Error::Blowup { coordinate: x.to_vec() };
    let sv = m.singular_values();
    let (smax, smin) = (sv[0], sv[sv.len() - 1]);
    if !(smin > SINGULAR_TOL * smax.max(1.0)) {
        return Err(blowup());
    }
    let inv = m.inverse().map_err(|_| blowup())?;
    if !inv.is_finite() {
        return Err(blowup());
    }
    Ok(inv)
}

/// Flags a closed-form factor whose determinant passes through zero between
/// two consecutive nodes.
#[derive(Default)]
pub(crate) struct BlockMonitor(PathMonitor);

impl BlockMonitor {
    pub(crate) fn check(&mut self, factors: &[&CMatrix], x: f64) -> Result<()> {
        let dets = factors.iter().map(|f| f.det()).collect::<Result<Vec<_>>>()?;
        match self.0.observe(dets) {
            Some(_) => Err(Error::Blowup { coordinate: vec![x] }),
            None => Ok(()),
        }
    }
}
