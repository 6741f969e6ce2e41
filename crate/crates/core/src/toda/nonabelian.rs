//! Maximally nonabelian Toda data: gradation of `C^{d+1}` with blocks
//! `(d, 1)`, `c_{-i} = E_{d+1,i}`, `c_{+i} = E_{i,d+1}`.
//!
//! With `γ_∓ = diag(β_{∓1}, β_{∓2})` chosen as
//! `(β_{-1}⁻¹)_{ij} = F_- ∂_{-i} H_{-j}`, `β_{-2} = 1/F_-`,
//! `(β_{+1})_{ij} = F_+ ∂_{+j} H_{+i}`, `β_{+2} = F_+`, the linear systems
//! for `μ_∓` are integrable and `(μ_-)_{21} = H_- − H_-(0)`,
//! `(μ_+)_{12} = H_+ − H_+(0)`.

use num_complex::Complex64;

use super::TodaData;
use crate::algebra::{CMatrix, GradedContext};
use crate::error::{Error, Result};
use crate::flow::{FieldOnGrid, MatrixField};

/// Smallest admissible `|F_∓|` and `|det ∂H_∓|` on the grid.
const NONDEGENERACY_TOL: f64 = 1e-10;

/// Free functions of the maximally nonabelian family. All fields live on
/// `R^d`: the minus ones are functions of `z^-`, the plus ones of `z^+`.
#[derive(Clone, Debug)]
pub struct NonabelianSpec {
    pub d: usize,
    /// Scalar (`1×1`).
    pub f_minus: MatrixField,
    /// Row `(H_{-1}, …, H_{-d})`, shape `1×d`.
    pub h_minus: MatrixField,
    /// Scalar (`1×1`).
    pub f_plus: MatrixField,
    /// Column `(H_{+1}, …, H_{+d})`, shape `d×1`.
    pub h_plus: MatrixField,
    /// `(ξ_+)_{12}`, shape `d×1`, a function of `z^-`.
    pub xi_plus: Option<MatrixField>,
    /// `(ξ_-)_{21}`, shape `1×d`, a function of `z^+`.
    pub xi_minus: Option<MatrixField>,
}

/// Extends a field on `R^d` to `R^{2d}` acting on coordinates
/// `offset..offset + d`.
fn extend(field: &MatrixField, d: usize, offset: usize) -> MatrixField {
    let f = field.clone();
    let g = field.clone();
    let slice = move |x: &[f64]| x[offset..offset + d].to_vec();
    let s2 = slice;
    MatrixField::multi(2 * d, field.components(), field.shape(), move |c, x| {
        f.eval(c, &slice(x)).unwrap_or_else(|_| {
            let (r, k) = f.shape();
            CMatrix::from_fn(r, k, |_, _| f64::NAN.into())
        })
    })
    .with_partials(move |c, k, x| {
        let (r, cols) = g.shape();
        if k < offset || k >= offset + d {
            return CMatrix::zeros(r, cols);
        }
        g.partial(c, k - offset, &s2(x))
            .unwrap_or_else(|_| CMatrix::from_fn(r, cols, |_, _| f64::NAN.into()))
    })
}

fn check_shape(name: &str, f: &MatrixField, d: usize, shape: (usize, usize)) -> Result<()> {
    if f.dim_in() != d || f.components() != 1 || f.shape() != shape {
        return Err(Error::Shape(format!(
            "{name}: expected one {}x{} component on R^{d}",
            shape.0, shape.1
        )));
    }
    Ok(())
}

/// Jacobian `J_{ij} = ∂_i H_j` of a row or column `H` at `z`.
fn jacobian(h: &MatrixField, z: &[f64], d: usize) -> Result<CMatrix> {
    let mut j = CMatrix::zeros(d, d);
    for i in 0..d {
        let dh = h.partial(0, i, z)?;
        for k in 0..d {
            j[(i, k)] = dh.as_slice()[k];
        }
    }
    Ok(j)
}

/// Builds the Toda data of the family and validates `F_∓ ≠ 0` and
/// `det ∂H_∓ ≠ 0` at every node of the chiral sub-grids of `axes`.
pub fn maximally_nonabelian_data(spec: &NonabelianSpec, axes: &[Vec<f64>]) -> Result<TodaData> {
    let d = spec.d;
    if d == 0 || axes.len() != 2 * d {
        return Err(Error::Shape(format!("need d > 0 and {} axes", 2 * d)));
    }
    check_shape("f_minus", &spec.f_minus, d, (1, 1))?;
    check_shape("f_plus", &spec.f_plus, d, (1, 1))?;
    check_shape("h_minus", &spec.h_minus, d, (1, d))?;
    check_shape("h_plus", &spec.h_plus, d, (d, 1))?;
    if let Some(x) = &spec.xi_plus {
        check_shape("xi_plus", x, d, (d, 1))?;
    }
    if let Some(x) = &spec.xi_minus {
        check_shape("xi_minus", x, d, (1, d))?;
    }
    for (label, f, h, range) in [
        ("minus", &spec.f_minus, &spec.h_minus, 0..d),
        ("plus", &spec.f_plus, &spec.h_plus, d..2 * d),
    ] {
        let sub = FieldOnGrid::from_fn(axes[range].to_vec(), |_| Ok(CMatrix::zeros(0, 0)))?;
        for z in sub.points() {
            let fv = f.at(&z)?[(0, 0)].norm();
            let jd = jacobian(h, &z, d)?.det()?.norm();
            if !(fv > NONDEGENERACY_TOL) || !(jd > NONDEGENERACY_TOL) {
                return Err(Error::InvalidInput(format!(
                    "{label} data degenerate at {z:?}: |F| = {fv:e}, |det dH| = {jd:e}"
                )));
            }
        }
    }

    let ctx = GradedContext::from_sizes(&[d, 1])?;
    let n = d + 1;
    let nan = move || CMatrix::from_fn(n, n, |_, _| f64::NAN.into());

    let (fm, hm) = (spec.f_minus.clone(), spec.h_minus.clone());
    let gamma_minus_r = MatrixField::new(d, (n, n), move |z| {
        let value = || -> Result<CMatrix> {
            let f = fm.at(z)?[(0, 0)];
            let b1 = jacobian(&hm, z, d)?.scale(f).inverse()?;
            let mut g = CMatrix::zeros(n, n);
            g.set_submatrix(0, 0, &b1);
            g[(d, d)] = Complex64::new(1.0, 0.0) / f;
            Ok(g)
        };
        value().unwrap_or_else(|_| nan())
    });
    let (fp, hp) = (spec.f_plus.clone(), spec.h_plus.clone());
    let gamma_plus_r = MatrixField::new(d, (n, n), move |z| {
        let value = || -> Result<CMatrix> {
            let f = fp.at(z)?[(0, 0)];
            let b1 = jacobian(&hp, z, d)?.transpose().scale(f);
            let mut g = CMatrix::zeros(n, n);
            g.set_submatrix(0, 0, &b1);
            g[(d, d)] = f;
            Ok(g)
        };
        value().unwrap_or_else(|_| nan())
    });
    let unit = |block: &Option<MatrixField>, r: usize, s: usize| -> Option<MatrixField> {
        block.as_ref().map(|b| {
            let c1 = ctx.clone();
            let c2 = ctx.clone();
            b.map_affine_to(
                (n, n),
                move |v| &CMatrix::identity(n) + &c1.embed(r, s, &v).expect("shape checked"),
                move |v| c2.embed(r, s, &v).expect("shape checked"),
            )
        })
    };
    let c_minus = MatrixField::constant_multi(
        2 * d,
        (0..d)
            .map(|i| CMatrix::from_fn(n, n, |r, c| if r == d && c == i { 1.0.into() } else { 0.0.into() }))
            .collect(),
    );
    let c_plus = MatrixField::constant_multi(
        2 * d,
        (0..d)
            .map(|i| CMatrix::from_fn(n, n, |r, c| if r == i && c == d { 1.0.into() } else { 0.0.into() }))
            .collect(),
    );
    TodaData::new(
        ctx.clone(),
        d,
        extend(&gamma_minus_r, d, 0),
        extend(&gamma_plus_r, d, d),
        c_minus,
        c_plus,
        unit(&spec.xi_minus, 1, 0).map(|f| extend(&f, d, d)),
        unit(&spec.xi_plus, 0, 1).map(|f| extend(&f, d, 0)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::re;
    use crate::flow::{uniform_axis, MatrixPolynomial, Monomial, Stencil};
    use crate::riccati::substitution_residual;
    use crate::toda::{construct_solution, redheffer_reid_fields, riccati_md_solutions, TodaOptions};

    fn poly(dim: usize, shape: (usize, usize), terms: &[(&[u32], &[f64])]) -> MatrixField {
        MatrixPolynomial::new(
            dim,
            shape,
            terms
                .iter()
                .map(|(p, c)| Monomial {
                    powers: p.to_vec(),
                    coeff: CMatrix::from_real(shape.0, shape.1, c),
                })
                .collect(),
        )
        .unwrap()
        .into_field()
    }

    fn scalar_spec(xi_plus: Option<MatrixField>) -> NonabelianSpec {
        let one = MatrixField::constant(1, CMatrix::identity(1));
        let z = poly(1, (1, 1), &[(&[1], &[1.0])]);
        NonabelianSpec {
            d: 1,
            f_minus: one.clone(),
            h_minus: z.clone(),
            f_plus: one,
            h_plus: z,
            xi_plus,
            xi_minus: None,
        }
    }

    #[test]
    fn unit_scalar_data_has_identity_gammas() {
        let axis = uniform_axis(0.0, 0.5, 11);
        let axes = vec![axis.clone(), axis];
        let data = maximally_nonabelian_data(&scalar_spec(None), &axes).unwrap();
        for x in [[0.1, 0.4], [0.5, 0.0]] {
            assert!(data.gamma_minus.at(&x).unwrap().max_abs_diff(&CMatrix::identity(2)) < 1e-14);
            assert!(data.gamma_plus.at(&x).unwrap().max_abs_diff(&CMatrix::identity(2)) < 1e-14);
        }
        data.check(&axes).unwrap();
    }

    #[test]
    fn scalar_family_matches_explicit_solution() {
        let axis = uniform_axis(0.0, 0.5, 41);
        let axes = vec![axis.clone(), axis];
        let xi = poly(1, (1, 1), &[(&[0], &[0.2]), (&[2], &[1.0])]);
        let data = maximally_nonabelian_data(&scalar_spec(Some(xi)), &axes).unwrap();
        let sol = construct_solution(&data, &axes, &TodaOptions::default()).unwrap();
        let c = 0.7;
        let fam = riccati_md_solutions(&data, &sol, &CMatrix::scalar(re(c)), &CMatrix::zeros(1, 1)).unwrap();
        let u = fam.minus.u().unwrap();
        for (k, z) in fam.minus.grid().points().iter().enumerate() {
            let want = 0.2 + z[0] * z[0] - c / (1.0 - c * z[0]);
            assert!((u[k][(0, 0)] - re(want)).norm() < 1e-8);
        }
        let rr = redheffer_reid_fields(&data, &axes).unwrap();
        let r = substitution_residual(&rr.minus_restricted(), &fam.minus, Stencil::Central4).unwrap();
        assert!(r.max_residual() < 1e-6, "{r:?}");
    }

    #[test]
    fn degenerate_jacobian_is_rejected() {
        let axis = uniform_axis(-0.5, 0.5, 5);
        let mut spec = scalar_spec(None);
        spec.h_minus = poly(1, (1, 1), &[(&[2], &[1.0])]);
        assert!(matches!(
            maximally_nonabelian_data(&spec, &[axis.clone(), axis]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn two_dimensional_data_is_integrable_and_mu_is_h() {
        let spec = NonabelianSpec {
            d: 2,
            f_minus: poly(2, (1, 1), &[(&[0, 0], &[1.0]), (&[1, 0], &[0.5])]),
            h_minus: poly(2, (1, 2), &[(&[1, 0], &[1.0, 0.0]), (&[0, 2], &[0.3, 0.0]), (&[0, 1], &[0.0, 1.0]), (&[1, 1], &[0.0, 0.2])]),
            f_plus: poly(2, (1, 1), &[(&[0, 0], &[1.0]), (&[0, 1], &[-0.3])]),
            h_plus: poly(2, (2, 1), &[(&[1, 0], &[1.0, 0.0]), (&[1, 1], &[0.1, 0.0]), (&[0, 1], &[0.0, 1.0]), (&[2, 0], &[0.0, -0.2])]),
            xi_plus: None,
            xi_minus: None,
        };
        let axis = uniform_axis(0.0, 0.4, 5);
        let axes = vec![axis.clone(); 4];
        let data = maximally_nonabelian_data(&spec, &axes).unwrap();
        let integ = data.integrability(&axes).unwrap();
        assert!(integ.max_residual() < 1e-8, "{integ:?}");
        let sol = construct_solution(&data, &axes, &TodaOptions::default()).unwrap();
        for (k, z) in sol.mu_minus.points().iter().enumerate() {
            let h = spec.h_minus.at(z).unwrap();
            let mu = &sol.mu_minus.values()[k];
            assert!((mu[(2, 0)] - h[(0, 0)]).norm() < 1e-6 && (mu[(2, 1)] - h[(0, 1)]).norm() < 1e-6);
        }
        for (k, z) in sol.mu_plus.points().iter().enumerate() {
            let h = spec.h_plus.at(z).unwrap();
            let mu = &sol.mu_plus.values()[k];
            assert!((mu[(0, 2)] - h[(0, 0)]).norm() < 1e-6 && (mu[(1, 2)] - h[(1, 0)]).norm() < 1e-6);
        }
    }
}
