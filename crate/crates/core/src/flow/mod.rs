//! Linear matrix flows, sampled fields, and finite differences.

mod curvature;
mod field;
mod grid;
mod linear;

pub use curvature::{curvature_at, zero_curvature_residual, zero_curvature_residual_side};
pub use field::{MatrixField, MatrixPolynomial, Monomial, FIELD_FD_STEP};
pub use grid::{
    derivative_along, fd_weights, partial_derivative, partial_derivative_with, uniform_axis, FieldOnGrid,
    ResidualReport, Stencil, Trajectory,
};
pub(crate) use grid::check_axes;
pub(crate) use linear::staircase;
pub use linear::{path_ordered_exp, path_ordered_exp_with, solve_linear_1d, solve_linear_md, MdOptions, MdSolution, Method, Side};
