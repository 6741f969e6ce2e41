mod common;

use graded_riccati::algebra::{CMatrix, GradedContext};
use graded_riccati::closed::{
    solve_b_zero, solve_cb_equal, solve_constant_bc, solve_md_nilpotent, solve_md_nilpotent_grid,
    solve_three_block_nilpotent, ConstantBC, ThreeBlockNilpotent, TriangularCoeffs1D,
};
use graded_riccati::flow::{uniform_axis, MatrixField};
use graded_riccati::riccati::{solve_direct, solve_direct_md, Component, RiccatiProblem};

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.max_abs_diff(b) / b.norm_max().max(1.0)
}

fn block_field(ctx: &GradedContext, blocks: Vec<Vec<Option<MatrixField>>>) -> MatrixField {
    let ctx = ctx.clone();
    let n = ctx.dim();
    MatrixField::new(1, (n, n), move |x| {
        let mut m = CMatrix::zeros(n, n);
        for (r, row) in blocks.iter().enumerate() {
            for (s, b) in row.iter().enumerate() {
                if let Some(b) = b {
                    ctx.block_set(&mut m, r, s, &b.at(x).unwrap()).unwrap();
                }
            }
        }
        m
    })
}

fn direct_u(ctx: &GradedContext, field: MatrixField, m: &CMatrix, x: f64) -> CMatrix {
    let p = RiccatiProblem::two_block(ctx.clone(), field, m, Component::Upper).unwrap();
    let sol = solve_direct(&p, (0.0, x), 1000).unwrap();
    sol.u().unwrap().last().unwrap().clone()
}

#[test]
fn block_triangular_closed_form() {
    for seed in 0..8 {
        let mut rng = common::rng(seed);
        let (n1, n2) = (1 + seed as usize % 2, 1 + seed as usize % 3);
        let ctx = GradedContext::from_sizes(&[n1, n2]).unwrap();
        let a = common::random_poly_field(&mut rng, 1, 1, (n1, n1), 2, 0.5);
        let c = common::random_poly_field(&mut rng, 1, 1, (n2, n1), 2, 0.5);
        let d = common::random_poly_field(&mut rng, 1, 1, (n2, n2), 2, 0.5);
        let m = common::random_matrix(&mut rng, n1, n2, 0.3);
        let field = block_field(&ctx, vec![vec![Some(a.clone()), None], vec![Some(c.clone()), Some(d.clone())]]);
        let coeffs = TriangularCoeffs1D::new(a, c, d, m.clone()).unwrap();
        let closed = solve_b_zero(&coeffs, 1.0, 200).unwrap();
        assert!(rel(&closed, &direct_u(&ctx, field, &m, 1.0)) < 1e-6);
    }
}

#[test]
fn symmetric_off_diagonal_closed_form() {
    for seed in 0..8 {
        let mut rng = common::rng(100 + seed);
        let n = 1 + seed as usize % 3;
        let ctx = GradedContext::from_sizes(&[n, n]).unwrap();
        let b = common::random_poly_field(&mut rng, 1, 1, (n, n), 2, 0.5);
        let m = common::random_matrix(&mut rng, n, n, 0.3);
        let field = block_field(&ctx, vec![vec![None, Some(b.clone())], vec![Some(b.clone()), None]]);
        let closed = solve_cb_equal(&b, &m, 1.0, 400).unwrap();
        assert!(rel(&closed, &direct_u(&ctx, field, &m, 1.0)) < 1e-6);
    }
}

/// Twenty terms of the hyperbolic series of `exp(x [[0, B], [C, 0]])`.
fn series_u(b: &CMatrix, c: &CMatrix, m: &CMatrix, x: f64) -> CMatrix {
    let n = b.rows();
    let bc = b * c;
    let cb = c * b;
    let (mut p11, mut p12, mut p21, mut p22) =
        (CMatrix::zeros(n, n), CMatrix::zeros(n, n), CMatrix::zeros(n, n), CMatrix::zeros(n, n));
    let (mut pow_bc, mut pow_cb) = (CMatrix::identity(n), CMatrix::identity(n));
    let mut even = 1.0; // x^{2k} / (2k)!
    for k in 0..20 {
        let odd = even * x / (2 * k + 1) as f64; // x^{2k+1} / (2k+1)!
        p11 += &pow_bc.scale_real(even);
        p22 += &pow_cb.scale_real(even);
        p12 += &(&pow_bc * b).scale_real(odd);
        p21 += &(&pow_cb * c).scale_real(odd);
        pow_bc = &pow_bc * &bc;
        pow_cb = &pow_cb * &cb;
        even = odd * x / (2 * k + 2) as f64;
    }
    let left = &p11 + &(m * &p21);
    let right = &p12 + &(m * &p22);
    &left.inverse().unwrap() * &right
}

#[test]
fn constant_off_diagonal_closed_form() {
    for seed in 0..8 {
        let mut rng = common::rng(200 + seed);
        let n = 1 + seed as usize % 3;
        let ctx = GradedContext::from_sizes(&[n, n]).unwrap();
        let b = &common::random_matrix(&mut rng, n, n, 0.5) + &CMatrix::identity(n);
        let c = &common::random_matrix(&mut rng, n, n, 0.5) + &CMatrix::identity(n).scale_real(0.5);
        let m = common::random_matrix(&mut rng, n, n, 0.3);
        let family = ConstantBC::new(b.clone(), c.clone(), m.clone()).unwrap();
        let closed = solve_constant_bc(&family, 0.8).unwrap();
        assert!(rel(&closed, &series_u(&b, &c, &m, 0.8)) < 1e-10);
        let mut lam = CMatrix::zeros(2 * n, 2 * n);
        lam.set_submatrix(0, n, &b);
        lam.set_submatrix(n, 0, &c);
        assert!(rel(&closed, &direct_u(&ctx, MatrixField::constant(1, lam), &m, 0.8)) < 1e-6);
    }
}

#[test]
fn degenerate_constant_block_is_rejected() {
    let z = CMatrix::zeros(2, 2);
    assert!(ConstantBC::new(z.clone(), CMatrix::identity(2), z).is_err());
}

#[test]
fn three_block_nilpotent_closed_form() {
    for seed in 0..8 {
        let mut rng = common::rng(300 + seed);
        let sizes = [1 + seed as usize % 2, 1, 1 + seed as usize % 3];
        let [n1, n2, n3] = sizes;
        let ctx = GradedContext::from_sizes(&sizes).unwrap();
        let c21 = common::random_poly_field(&mut rng, 1, 1, (n2, n1), 2, 0.5);
        let c31 = common::random_poly_field(&mut rng, 1, 1, (n3, n1), 2, 0.5);
        let c32 = common::random_poly_field(&mut rng, 1, 1, (n3, n2), 2, 0.5);
        let p = ThreeBlockNilpotent {
            c21: c21.clone(),
            c31: c31.clone(),
            c32: c32.clone(),
            m12: common::random_matrix(&mut rng, n1, n2, 0.3),
            m13: common::random_matrix(&mut rng, n1, n3, 0.3),
            m23: common::random_matrix(&mut rng, n2, n3, 0.3),
        };
        let closed = solve_three_block_nilpotent(&p, 1.0, 200).unwrap();
        let field = block_field(
            &ctx,
            vec![vec![None, None, None], vec![Some(c21), None, None], vec![Some(c31), Some(c32), None]],
        );
        let mut init = CMatrix::identity(ctx.dim());
        ctx.block_set(&mut init, 0, 1, &p.m12).unwrap();
        ctx.block_set(&mut init, 0, 2, &p.m13).unwrap();
        ctx.block_set(&mut init, 1, 2, &p.m23).unwrap();
        let sol = solve_direct(&RiccatiProblem::upper(ctx.clone(), field, init).unwrap(), (0.0, 1.0), 1000).unwrap();
        let y = sol.last();
        assert!(rel(&closed.u12, &ctx.block_get(y, 0, 1).unwrap()) < 1e-6);
        assert!(rel(&closed.u13, &ctx.block_get(y, 0, 2).unwrap()) < 1e-6);
        assert!(rel(&closed.u23, &ctx.block_get(y, 1, 2).unwrap()) < 1e-6);
    }
}

/// `C_i = ∂_i Φ` for a random polynomial potential `Φ`, so the curl vanishes.
fn gradient_field(seed: u64, n2: usize, n1: usize) -> MatrixField {
    let mut rng = common::rng(seed);
    let phi = common::random_poly_field(&mut rng, 2, 1, (n2, n1), 3, 0.5);
    MatrixField::multi(2, 2, (n2, n1), move |i, x| phi.partial(0, i, x).unwrap())
}

#[test]
fn multidimensional_nilpotent_closed_form() {
    for seed in 0..6 {
        let (n1, n2) = (1 + seed as usize % 2, 1 + seed as usize % 3);
        let c = gradient_field(400 + seed, n2, n1);
        let m = common::random_matrix(&mut common::rng(450 + seed), n1, n2, 0.3);
        let ctx = GradedContext::from_sizes(&[n1, n2]).unwrap();
        let lam = {
            let (ctx, c) = (ctx.clone(), c.clone());
            MatrixField::multi(2, 2, (n1 + n2, n1 + n2), move |i, x| ctx.embed(1, 0, &c.eval(i, x).unwrap()).unwrap())
        };
        let axis = uniform_axis(0.0, 0.6, 7);
        let axes = vec![axis.clone(), axis];
        let grid = solve_md_nilpotent_grid(&c, &m, &axes, 20).unwrap();
        let p = RiccatiProblem::two_block(ctx, lam, &m, Component::Upper).unwrap();
        let direct = solve_direct_md(&p, &axes, None, 40).unwrap();
        for (k, u) in direct.u().unwrap().iter().enumerate() {
            assert!(rel(&grid.values()[k], u) < 1e-6);
        }
        let point = solve_md_nilpotent(&c, &m, &[0.6, 0.6], 50).unwrap();
        assert!(rel(&point, grid.values().last().unwrap()) < 1e-9);
    }
}
