mod common;

use graded_riccati::algebra::{re, CMatrix, GradedContext, Part};
use graded_riccati::flow::{uniform_axis, MatrixField, Stencil};
use graded_riccati::riccati::{
    covariance_check, gauge_transform_sampled, solve_by_linearization, solve_by_linearization_md, solve_direct,
    solve_direct_md, substitution_residual, Component, RiccatiProblem,
};

fn random_problem(seed: u64, sizes: &[usize], component: Component) -> RiccatiProblem {
    let ctx = GradedContext::from_sizes(sizes).unwrap();
    let n = ctx.dim();
    let mut rng = common::rng(seed);
    let field = common::random_poly_field(&mut rng, 1, 1, (n, n), 2, 0.5);
    let initial = &CMatrix::identity(n) + &ctx.project(&common::random_matrix(&mut rng, n, n, 0.3), component.part()).unwrap();
    RiccatiProblem::new(ctx, field, initial, component).unwrap()
}

#[test]
fn direct_and_linearized_solutions_agree() {
    for (k, sizes) in [vec![1, 1], vec![2, 2], vec![1, 1, 1]].iter().enumerate() {
        for seed in 0..6 {
            for component in [Component::Upper, Component::Lower] {
                let p = random_problem(100 * k as u64 + seed, sizes, component);
                let a = solve_direct(&p, (0.0, 1.0), 400).unwrap();
                let b = solve_by_linearization(&p, (0.0, 1.0), 400).unwrap();
                assert!(a.relative_diff(&b) < 1e-6, "{sizes:?} seed {seed}: {}", a.relative_diff(&b));
            }
        }
    }
}

#[test]
fn direct_solution_satisfies_the_equation() {
    let p = random_problem(7, &[2, 1], Component::Upper);
    let sol = solve_direct(&p, (0.0, 1.0), 400).unwrap();
    let r = substitution_residual(&p.field, &sol, Stencil::Central4).unwrap();
    assert!(r.max_residual() < 1e-7, "{r:?}");
}

#[test]
fn scalar_hyperbolic_tangent() {
    let ctx = GradedContext::from_sizes(&[1, 1]).unwrap();
    let lam = MatrixField::constant(1, CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    let p = RiccatiProblem::two_block(ctx, lam, &CMatrix::zeros(1, 1), Component::Upper).unwrap();
    for sol in [solve_direct(&p, (0.0, 2.0), 2000).unwrap(), solve_by_linearization(&p, (0.0, 2.0), 2000).unwrap()] {
        for (k, u) in sol.u().unwrap().iter().enumerate() {
            let x = sol.coordinate(k)[0];
            assert!((u[(0, 0)] - re(x.tanh())).norm() < 1e-8);
        }
    }
}

#[test]
fn gauge_covariance_for_grade_zero_chi() {
    for seed in 0..5 {
        let p = random_problem(500 + seed, &[2, 2], Component::Upper);
        let ctx = p.ctx.clone();
        let mut rng = common::rng(900 + seed);
        let raw = common::random_poly_field(&mut rng, 1, 1, (4, 4), 2, 0.3);
        let chi = {
            let ctx = ctx.clone();
            raw.map_affine(
                move |v| &CMatrix::identity(4) + &ctx.project_grade(&v, 0).unwrap(),
                {
                    let ctx = p.ctx.clone();
                    move |v| ctx.project_grade(&v, 0).unwrap()
                },
            )
        };
        let r = covariance_check(&p, &chi, (0.0, 1.0), 400).unwrap();
        assert!(r.residuals["covariance"] < 1e-6, "{r:?}");
        assert_eq!(r.residuals["gauge-block-defect"], 0.0);
    }
}

#[test]
fn gauging_by_a_solution_removes_the_positive_part() {
    let p = random_problem(3, &[1, 2], Component::Upper);
    let sol = solve_direct(&p, (0.0, 1.0), 1000).unwrap();
    let lp = gauge_transform_sampled(&p.field, &sol.grid(), Stencil::Central4).unwrap();
    let worst = lp[0]
        .values()
        .iter()
        .map(|v| p.ctx.project(v, Part::Positive).unwrap().norm_max())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst:e}");
}

#[test]
fn commuting_directions_are_path_independent() {
    let ctx = GradedContext::from_sizes(&[1, 2]).unwrap();
    let mut rng = common::rng(42);
    let a = common::random_real(&mut rng, 3, 3, 0.6);
    let b = &(&a * &a).scale_real(0.5) - &a;
    let field = MatrixField::constant_multi(2, vec![a, b]);
    let initial = &CMatrix::identity(3) + &ctx.project(&common::random_real(&mut rng, 3, 3, 0.3), Part::Positive).unwrap();
    let p = RiccatiProblem::upper(ctx, field, initial).unwrap();
    let axis = uniform_axis(0.0, 0.5, 11);
    let axes = vec![axis.clone(), axis];
    let xy = solve_direct_md(&p, &axes, Some(&[0, 1]), 20).unwrap();
    let yx = solve_direct_md(&p, &axes, Some(&[1, 0]), 20).unwrap();
    let lin = solve_by_linearization_md(&p, &axes, 20).unwrap();
    assert!(xy.relative_diff(&yx) < 1e-8);
    assert!(xy.relative_diff(&lin) < 1e-8);
    let r = substitution_residual(&p.field, &xy, Stencil::Central4).unwrap();
    assert!(r.max_residual() < 1e-5, "{r:?}");
}
