//! Riccati-type matrix differential equations attached to block
//! Z-gradations of gl(n, C).
//!
//! * [`algebra`]: complex matrices, gradations, generalized Gauss decomposition.
//! * [`flow`]: linear matrix flows, path-ordered exponentials, zero curvature.
//! * [`riccati`]: Riccati-type equations, solved directly and by linearization.
//! * [`closed`]: closed-form solution families.
//! * [`toda`]: generalized WZNW equations, multidimensional Toda systems and
//!   the associated Redheffer–Reid systems.

pub mod algebra;
pub mod closed;
pub mod error;
pub mod flow;
pub mod riccati;
pub mod toda;

pub use algebra::{CMatrix, GradedContext, Part};
pub use error::{Error, Result};
pub use num_complex::Complex64;
