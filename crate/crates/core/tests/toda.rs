mod common;

use common::poly;
use graded_riccati::algebra::{re, CMatrix, GradedContext};
use graded_riccati::flow::{uniform_axis, FieldOnGrid, MatrixField, Stencil};
use graded_riccati::toda::{
    connection_curvature, construct_solution, maximally_nonabelian_data, reconstruct_wznw, redheffer_reid_fields,
    riccati_md_solutions, riccati_md_substitution, wznw_residual, NonabelianSpec, TodaData, TodaOptions,
};

fn spec(with_xi: bool) -> NonabelianSpec {
    NonabelianSpec {
        d: 2,
        f_minus: poly(2, (1, 1), &[(&[0, 0], &[1.0]), (&[1, 0], &[0.2])]),
        h_minus: poly(
            2,
            (1, 2),
            &[(&[1, 0], &[1.0, 0.0]), (&[0, 2], &[0.1, 0.0]), (&[0, 1], &[0.0, 1.0]), (&[1, 1], &[0.0, 0.1])],
        ),
        f_plus: poly(2, (1, 1), &[(&[0, 0], &[1.0]), (&[0, 1], &[-0.2])]),
        h_plus: poly(
            2,
            (2, 1),
            &[(&[1, 0], &[1.0, 0.0]), (&[1, 1], &[0.1, 0.0]), (&[0, 1], &[0.0, 1.0]), (&[2, 0], &[0.0, -0.1])],
        ),
        xi_plus: with_xi.then(|| poly(2, (2, 1), &[(&[0, 0], &[0.1, -0.2]), (&[1, 1], &[1.0, 0.5])])),
        xi_minus: with_xi.then(|| poly(2, (1, 2), &[(&[2, 0], &[0.4, 0.0]), (&[0, 1], &[0.0, 1.0])])),
    }
}

fn grid() -> Vec<Vec<f64>> {
    vec![uniform_axis(0.0, 0.4, 9); 4]
}

#[test]
fn nonabelian_end_to_end() {
    let axes = grid();
    let s = spec(true);
    let data = maximally_nonabelian_data(&s, &axes).unwrap();
    let integ = data.integrability(&axes).unwrap();
    assert!(integ.max_residual() < 1e-8, "{integ:?}");
    let sol = construct_solution(&data, &axes, &TodaOptions::default()).unwrap();
    assert!(sol.report.residuals["toda"] < 1e-5, "{:?}", sol.report);

    let rr = redheffer_reid_fields(&data, &axes).unwrap();
    assert!(rr.zero_curvature(&axes).unwrap().max_residual() < 1e-6);

    let m_minus = CMatrix::from_real(2, 1, &[0.4, -0.3]);
    let m_plus = CMatrix::from_real(1, 2, &[-0.5, 0.6]);
    let fam = riccati_md_solutions(&data, &sol, &m_minus, &m_plus).unwrap();
    let report = riccati_md_substitution(&data, &rr, &fam, Stencil::Central4).unwrap();
    assert!(report.max_residual() < 1e-5, "{report:?}");

    // U_{-i} = ξ_{+i} + ∂_{-i} log(1 − H_- m_-).
    let u = fam.minus.u().unwrap();
    for (k, z) in fam.minus.grid().points().iter().enumerate() {
        let h = s.h_minus.at(z).unwrap();
        let den = re(1.0) - (&h * &m_minus)[(0, 0)];
        let xi = s.xi_plus.as_ref().unwrap().at(z).unwrap();
        for i in 0..2 {
            let dh = s.h_minus.partial(0, i, z).unwrap();
            let want = xi[(i, 0)] - (&dh * &m_minus)[(0, 0)] / den;
            assert!((u[k][(i, 0)] - want).norm() < 1e-8);
        }
    }
    // U_{+j} = ξ_{-j} + ∂_{+j} log(1 − m_+ H_+).
    let u = fam.plus.u().unwrap();
    for (k, z) in fam.plus.grid().points().iter().enumerate() {
        let h = s.h_plus.at(z).unwrap();
        let den = re(1.0) - (&m_plus * &h)[(0, 0)];
        let eta = s.xi_minus.as_ref().unwrap().at(z).unwrap();
        for j in 0..2 {
            let dh = s.h_plus.partial(0, j, z).unwrap();
            let want = eta[(0, j)] - (&m_plus * &dh)[(0, 0)] / den;
            assert!((u[k][(0, j)] - want).norm() < 1e-8);
        }
    }
}

#[test]
fn gamma_does_not_depend_on_dressing() {
    let axes = grid();
    let plain = construct_solution(&maximally_nonabelian_data(&spec(false), &axes).unwrap(), &axes, &TodaOptions::default())
        .unwrap();
    let dressed = construct_solution(&maximally_nonabelian_data(&spec(true), &axes).unwrap(), &axes, &TodaOptions::default())
        .unwrap();
    assert_eq!(plain.gamma.max_abs_diff(&dressed.gamma), 0.0);
}

fn liouville() -> (TodaData, Vec<Vec<f64>>) {
    let ctx = GradedContext::from_sizes(&[1, 1]).unwrap();
    let id = MatrixField::constant(2, CMatrix::identity(2));
    let data = TodaData::new(
        ctx,
        1,
        id.clone(),
        id,
        MatrixField::constant(2, CMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0])),
        MatrixField::constant(2, CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])),
        Some(MatrixField::new(2, (2, 2), |x| CMatrix::from_real(2, 2, &[1.0, 0.0, x[1].sin(), 1.0]))),
        Some(MatrixField::new(2, (2, 2), |x| CMatrix::from_real(2, 2, &[1.0, x[0] * x[0], 0.0, 1.0]))),
    )
    .unwrap();
    (data, vec![uniform_axis(0.0, 0.5, 41); 2])
}

#[test]
fn liouville_wznw_and_connection() {
    let (data, axes) = liouville();
    let sol = construct_solution(&data, &axes, &TodaOptions::default()).unwrap();
    assert!(sol.report.residuals["toda"] < 1e-5);
    let w = reconstruct_wznw(&sol, &data, Stencil::Central4).unwrap();
    assert!(w.report.max_residual() < 1e-5, "{:?}", w.report);
    assert!(w.report.residuals["psi0-vs-gamma"] < 1e-6);
    let c = connection_curvature(&sol.gamma, &data.c_minus, &data.c_plus, Stencil::Central4).unwrap();
    assert!(c.max_residual() < 1e-5, "{c:?}");
}

#[test]
fn product_of_chiral_factors_solves_wznw() {
    // ψ = A(z^+) B(z^-) with coordinates (z^-, z^+).
    let axes = vec![uniform_axis(0.0, 0.5, 51); 2];
    let a = |v: f64| CMatrix::from_real(2, 2, &[1.0 + v, v * v, v.sin(), 1.0]);
    let b = |u: f64| CMatrix::from_real(2, 2, &[u.exp(), 0.3 * u, -u, 1.0 + u * u]);
    let good = FieldOnGrid::from_fn(axes.clone(), |x| Ok(&a(x[1]) * &b(x[0]))).unwrap();
    let r = wznw_residual(&good, Stencil::Central4).unwrap();
    assert!(r.residuals["wznw"] < 1e-6, "{r:?}");
    let reversed = FieldOnGrid::from_fn(axes, |x| Ok(&b(x[0]) * &a(x[1]))).unwrap();
    assert!(wznw_residual(&reversed, Stencil::Central4).unwrap().residuals["wznw"] > 1e-2);
}
