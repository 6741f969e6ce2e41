//! Zero-curvature (integrability) checks for multidimensional flows.

use super::field::MatrixField;
use super::grid::{FieldOnGrid, ResidualReport};
use super::linear::Side;
use crate::algebra::CMatrix;
use crate::error::{Error, Result};

/// Curvature of the pair `(i, j)` at `x`, with components `ci`, `cj`
/// differentiated along coordinates `ki`, `kj`:
/// `∂_i λ_j − ∂_j λ_i ± [λ_i, λ_j]` (`+` for right action, `−` for left).
pub fn curvature_at(
    field: &MatrixField,
    (ci, ki): (usize, usize),
    (cj, kj): (usize, usize),
    x: &[f64],
    side: Side,
) -> Result<CMatrix> {
    let li = field.eval(ci, x)?;
    let lj = field.eval(cj, x)?;
    let dij = field.partial(cj, ki, x)?;
    let dji = field.partial(ci, kj, x)?;
    let br = li.commutator(&lj);
    let base = &dij - &dji;
    Ok(match side {
        Side::Right => &base + &br,
        Side::Left => &base - &br,
    })
}

/// `max ‖∂_i λ_j − ∂_j λ_i + [λ_i, λ_j]‖` over the grid and all pairs; the
/// integrability condition of `∂_i ψ = ψ λ_i`.
pub fn zero_curvature_residual(field: &MatrixField, axes: &[Vec<f64>]) -> Result<ResidualReport> {
    zero_curvature_residual_side(field, axes, Side::Right)
}

/// As [`zero_curvature_residual`], with the commutator sign matching `side`.
pub fn zero_curvature_residual_side(
    field: &MatrixField,
    axes: &[Vec<f64>],
    side: Side,
) -> Result<ResidualReport> {
    let d = field.components();
    if d < 2 {
        return Err(Error::InvalidInput("zero curvature needs at least two directions".into()));
    }
    if field.dim_in() != d || axes.len() != d {
        return Err(Error::Shape(format!(
            "{d} components need {d} coordinates and axes, got {} and {}",
            field.dim_in(),
            axes.len()
        )));
    }
    let grid = FieldOnGrid::from_fn(axes.to_vec(), |_| Ok(CMatrix::zeros(1, 1)))?;
    let points = grid.points();
    let mut report = ResidualReport::default();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i + 1..d {
            let mut pair = 0.0f64;
            for x in &points {
                pair = pair.max(curvature_at(field, (i, i), (j, j), x, side)?.norm_max());
            }
            report.insert(format!("curvature({i},{j})"), pair);
            worst = worst.max(pair);
        }
    }
    report.insert("zero-curvature", worst);
    report.note("points", points.len());
    report.note(
        "partials",
        if field.has_analytic_partials() { "analytic" } else { "finite-difference" },
    );
    Ok(report)
}
