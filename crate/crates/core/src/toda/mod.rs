//! Generalized WZNW equations on `R^{2d}`, their multidimensional Toda
//! reduction, and the integrable multidimensional Riccati families built
//! from Toda solutions.
//!
//! Coordinates are ordered `(z^{-1}, …, z^{-d}, z^{+1}, …, z^{+d})`; every
//! field of [`TodaData`] is a function of all `2d` coordinates.

mod construct;
mod nonabelian;
mod reid;
mod residuals;

pub use construct::{construct_solution, reconstruct_wznw, TodaOptions, TodaSolution, WznwReconstruction};
pub use nonabelian::{maximally_nonabelian_data, NonabelianSpec};
pub use reid::{
    redheffer_reid_fields, riccati_md_solutions, riccati_md_solutions_seeded, riccati_md_substitution, two_block_components, two_block_seeds,
    BlockComponents,
    RedhefferReid, RiccatiFamily,
};
pub use residuals::{connection_curvature, toda_residual, wznw_constraint_residuals, wznw_residual};

use crate::algebra::{CMatrix, GradedContext, Part};
use crate::error::{Error, Result};
use crate::flow::{zero_curvature_residual, FieldOnGrid, MatrixField, ResidualReport};

/// Tolerance of the pointwise data checks (chirality, commutativity, grade).
pub const DATA_TOL: f64 = 1e-10;
/// Tolerance of the integrability check of the linear systems for `μ_∓`.
pub const INTEGRABILITY_TOL: f64 = 1e-8;

/// Input data of the Toda construction.
#[derive(Clone, Debug)]
pub struct TodaData {
    pub ctx: GradedContext,
    pub d: usize,
    /// `G_0`-valued, depends on `z^-` only.
    pub gamma_minus: MatrixField,
    /// `G_0`-valued, depends on `z^+` only.
    pub gamma_plus: MatrixField,
    /// `d` components valued in grade `−1`, independent of `z^+`.
    pub c_minus: MatrixField,
    /// `d` components valued in grade `+1`, independent of `z^-`.
    pub c_plus: MatrixField,
    /// `G_{<0}`-valued, depends on `z^+` only.
    pub xi_minus: MatrixField,
    /// `G_{>0}`-valued, depends on `z^-` only.
    pub xi_plus: MatrixField,
    raw: Box<[MatrixField; 6]>,
}

impl TodaData {
    /// Assembles the data; values are projected on their structural blocks
    /// (the defects are measured by [`TodaData::check`]). Missing `ξ_∓`
    /// default to the identity.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        ctx: GradedContext,
        d: usize,
        gamma_minus: MatrixField,
        gamma_plus: MatrixField,
        c_minus: MatrixField,
        c_plus: MatrixField,
        xi_minus: Option<MatrixField>,
        xi_plus: Option<MatrixField>,
    ) -> Result<Self> {
        let n = ctx.dim();
        if d == 0 {
            return Err(Error::InvalidInput("d must be positive".into()));
        }
        let identity = MatrixField::constant(2 * d, CMatrix::identity(n));
        let xi_minus = xi_minus.unwrap_or_else(|| identity.clone());
        let xi_plus = xi_plus.unwrap_or(identity);
        for (name, f, comps) in [
            ("gamma_minus", &gamma_minus, 1),
            ("gamma_plus", &gamma_plus, 1),
            ("c_minus", &c_minus, d),
            ("c_plus", &c_plus, d),
            ("xi_minus", &xi_minus, 1),
            ("xi_plus", &xi_plus, 1),
        ] {
            if f.shape() != (n, n) || f.dim_in() != 2 * d || f.components() != comps {
                return Err(Error::Shape(format!(
                    "{name}: expected {comps} component(s) of {n}x{n} on R^{}, got {} of {}x{} on R^{}",
                    2 * d,
                    f.components(),
                    f.shape().0,
                    f.shape().1,
                    f.dim_in()
                )));
            }
        }
        let raw = Box::new([
            gamma_minus.clone(),
            gamma_plus.clone(),
            c_minus.clone(),
            c_plus.clone(),
            xi_minus.clone(),
            xi_plus.clone(),
        ]);
        let grade = |field: &MatrixField, g: isize| {
            let (c1, c2) = (ctx.clone(), ctx.clone());
            field.map_affine(
                move |v| c1.project_grade(&v, g).expect("shape checked"),
                move |v| c2.project_grade(&v, g).expect("shape checked"),
            )
        };
        let unit = |field: &MatrixField, part: Part| {
            let (c1, c2) = (ctx.clone(), ctx.clone());
            field.map_affine(
                move |v| &CMatrix::identity(c1.dim()) + &c1.project(&v, part).expect("shape checked"),
                move |v| c2.project(&v, part).expect("shape checked"),
            )
        };
        Ok(Self {
            gamma_minus: grade(&gamma_minus, 0),
            gamma_plus: grade(&gamma_plus, 0),
            c_minus: grade(&c_minus, -1),
            c_plus: grade(&c_plus, 1),
            xi_minus: unit(&xi_minus, Part::Negative),
            xi_plus: unit(&xi_plus, Part::Positive),
            ctx,
            d,
            raw,
        })
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn minus_coords(&self) -> Vec<usize> {
        (0..self.d).collect()
    }

    pub fn plus_coords(&self) -> Vec<usize> {
        (self.d..2 * self.d).collect()
    }

    /// Checks, at every point of the grid: chirality of all fields, mutual
    /// commutativity of the `c_{∓i}`, and that values lie in their grades.
    pub fn check(&self, axes: &[Vec<f64>]) -> Result<ResidualReport> {
        if axes.len() != 2 * self.d {
            return Err(Error::Shape(format!("grid must have {} axes", 2 * self.d)));
        }
        let points = FieldOnGrid::from_fn(axes.to_vec(), |_| Ok(CMatrix::zeros(1, 1)))?.points();
        let [gm, gp, cm, cp, xm, xp] = &*self.raw;
        let minus = self.minus_coords();
        let plus = self.plus_coords();
        let mut report = ResidualReport::default();
        // (field, coordinates it must not depend on, label)
        let chirality: [(&MatrixField, &[usize], &str); 6] = [
            (gm, &plus, "chirality gamma_minus"),
            (gp, &minus, "chirality gamma_plus"),
            (cm, &plus, "chirality c_minus"),
            (cp, &minus, "chirality c_plus"),
            (xm, &minus, "chirality xi_minus"),
            (xp, &plus, "chirality xi_plus"),
        ];
        for (field, coords, label) in chirality {
            let mut worst = 0.0f64;
            for x in &points {
                for c in 0..field.components() {
                    for &k in coords {
                        worst = worst.max(field.partial(c, k, x)?.norm_max());
                    }
                }
            }
            report.insert(label, worst);
        }
        let mut comm = 0.0f64;
        let mut grade = 0.0f64;
        for x in &points {
            for (field, g) in [(cm, -1isize), (cp, 1)] {
                let vals = (0..self.d).map(|i| field.eval(i, x)).collect::<Result<Vec<_>>>()?;
                for (i, a) in vals.iter().enumerate() {
                    grade = grade.max(a.max_abs_diff(&self.ctx.project_grade(a, g)?));
                    for b in &vals[i + 1..] {
                        comm = comm.max(a.commutator(b).norm_max());
                    }
                }
            }
            for gamma in [gm, gp] {
                grade = grade.max(self.ctx.off_diagonal_defect(&gamma.at(x)?)?);
            }
            grade = grade.max(self.ctx.unit_triangular_defect(&xm.at(x)?, Part::Negative)?);
            grade = grade.max(self.ctx.unit_triangular_defect(&xp.at(x)?, Part::Positive)?);
        }
        report.insert("commutators", comm);
        report.insert("grade", grade);
        report.note("points", points.len());
        for (label, &value) in &report.residuals {
            if value > DATA_TOL {
                return Err(Error::Integrability {
                    detail: label.clone(),
                    residual: value,
                    tolerance: DATA_TOL,
                });
            }
        }
        Ok(report)
    }

    /// `γ_- c_{-i} γ_-⁻¹` (d components on `R^{2d}`).
    pub fn minus_generator(&self) -> MatrixField {
        conjugated(&self.gamma_minus, &self.c_minus, self.d)
    }

    /// `γ_+ c_{+i} γ_+⁻¹`.
    pub fn plus_generator(&self) -> MatrixField {
        conjugated(&self.gamma_plus, &self.c_plus, self.d)
    }

    /// Integrability of the `μ_∓` systems:
    /// `∂_{∓i}(γ_∓ c_{∓j} γ_∓⁻¹) − ∂_{∓j}(γ_∓ c_{∓i} γ_∓⁻¹)`, checked on the
    /// chiral sub-grids through the grid origin. For two blocks these are
    /// the conditions on `β_∓` and `X_∓`.
    pub fn integrability(&self, axes: &[Vec<f64>]) -> Result<ResidualReport> {
        let mut report = ResidualReport::default();
        if self.d < 2 {
            report.insert("integrability-minus", 0.0);
            report.insert("integrability-plus", 0.0);
            return Ok(report);
        }
        let base: Vec<f64> = axes.iter().map(|a| a[0]).collect();
        for (label, field, coords) in [
            ("integrability-minus", self.minus_generator(), self.minus_coords()),
            ("integrability-plus", self.plus_generator(), self.plus_coords()),
        ] {
            let sub: Vec<Vec<f64>> = coords.iter().map(|&k| axes[k].clone()).collect();
            let r = zero_curvature_residual(&field.restrict(&coords, &base), &sub)?;
            report.insert(label, r.max_residual());
        }
        Ok(report)
    }

    pub(crate) fn require_integrable(&self, axes: &[Vec<f64>]) -> Result<ResidualReport> {
        let report = self.integrability(axes)?;
        for (label, &value) in &report.residuals {
            if value > INTEGRABILITY_TOL {
                return Err(Error::Integrability {
                    detail: label.clone(),
                    residual: value,
                    tolerance: INTEGRABILITY_TOL,
                });
            }
        }
        Ok(report)
    }
}

fn conjugated(gamma: &MatrixField, c: &MatrixField, d: usize) -> MatrixField {
    let (gamma, c) = (gamma.clone(), c.clone());
    let shape = c.shape();
    MatrixField::multi(2 * d, d, shape, move |i, x| {
        let value = || -> Result<CMatrix> {
            let g = gamma.at(x)?;
            Ok(&(&g * &c.eval(i, x)?) * &g.inverse()?)
        };
        value().unwrap_or_else(|_| CMatrix::from_fn(shape.0, shape.1, |_, _| f64::NAN.into()))
    })
}
