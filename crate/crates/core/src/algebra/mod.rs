//! Complex matrices, block gradations of gl(n, C), and generalized Gauss
//! decomposition.

mod gauss;
mod grading;
mod matrix;

pub use gauss::{
    check_decomposable, gauss_decompose, gauss_decompose_opposite, GaussFactors, OppositeFactors,
    PathMonitor, DEFAULT_GAUSS_TOL,
};
pub use grading::{unit_triangular_inverse, BlockPartition, GradedContext, Part};
pub use matrix::CMatrix;

/// Shorthand for a real complex number.
#[inline]
pub fn re(x: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(x, 0.0)
}
