mod common;

use graded_riccati::algebra::{
    gauss_decompose, gauss_decompose_opposite, CMatrix, GradedContext, Part, DEFAULT_GAUSS_TOL,
};
use proptest::prelude::*;

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.max_abs_diff(b) / b.norm_max().max(1.0)
}

/// Block LDU for two blocks written out by hand.
fn two_block_oracle(a: &CMatrix, n1: usize) -> (CMatrix, CMatrix, CMatrix) {
    let n = a.rows();
    let n2 = n - n1;
    let a11 = a.submatrix(0, 0, n1, n1);
    let a12 = a.submatrix(0, n1, n1, n2);
    let a21 = a.submatrix(n1, 0, n2, n1);
    let a22 = a.submatrix(n1, n1, n2, n2);
    let inv = a11.inverse().unwrap();
    let mut lower = CMatrix::identity(n);
    lower.set_submatrix(n1, 0, &(&a21 * &inv));
    let mut upper = CMatrix::identity(n);
    upper.set_submatrix(0, n1, &(&inv * &a12));
    let mut zero = CMatrix::zeros(n, n);
    zero.set_submatrix(0, 0, &a11);
    zero.set_submatrix(n1, n1, &(&a22 - &(&(&a21 * &inv) * &a12)));
    (lower, zero, upper)
}

/// Three-block LDU by two explicit Schur steps.
fn three_block_oracle(a: &CMatrix, sizes: [usize; 3]) -> (CMatrix, CMatrix, CMatrix) {
    let [n1, n2, n3] = sizes;
    let n = n1 + n2 + n3;
    let o = [0, n1, n1 + n2];
    let blk = |m: &CMatrix, r: usize, s: usize| m.submatrix(o[r], o[s], sizes[r], sizes[s]);
    let inv1 = blk(a, 0, 0).inverse().unwrap();
    let l21 = &blk(a, 1, 0) * &inv1;
    let l31 = &blk(a, 2, 0) * &inv1;
    let u12 = &inv1 * &blk(a, 0, 1);
    let u13 = &inv1 * &blk(a, 0, 2);
    let s22 = &blk(a, 1, 1) - &(&l21 * &blk(a, 0, 1));
    let s23 = &blk(a, 1, 2) - &(&l21 * &blk(a, 0, 2));
    let s32 = &blk(a, 2, 1) - &(&l31 * &blk(a, 0, 1));
    let s33 = &blk(a, 2, 2) - &(&l31 * &blk(a, 0, 2));
    let inv2 = s22.inverse().unwrap();
    let l32 = &s32 * &inv2;
    let u23 = &inv2 * &s23;
    let z3 = &s33 - &(&l32 * &s23);
    let mut lower = CMatrix::identity(n);
    lower.set_submatrix(o[1], 0, &l21);
    lower.set_submatrix(o[2], 0, &l31);
    lower.set_submatrix(o[2], o[1], &l32);
    let mut upper = CMatrix::identity(n);
    upper.set_submatrix(0, o[1], &u12);
    upper.set_submatrix(0, o[2], &u13);
    upper.set_submatrix(o[1], o[2], &u23);
    let mut zero = CMatrix::zeros(n, n);
    zero.set_submatrix(0, 0, &blk(a, 0, 0));
    zero.set_submatrix(o[1], o[1], &s22);
    zero.set_submatrix(o[2], o[2], &z3);
    (lower, zero, upper)
}

#[test]
fn two_blocks_match_explicit_formulas() {
    let mut rng = common::rng(11);
    for n1 in 1..4 {
        for n2 in 1..4 {
            let ctx = GradedContext::from_sizes(&[n1, n2]).unwrap();
            let a = common::dominant(&mut rng, n1 + n2);
            let f = gauss_decompose(&ctx, &a, DEFAULT_GAUSS_TOL).unwrap();
            let (l, z, u) = two_block_oracle(&a, n1);
            assert!(f.lower.max_abs_diff(&l) < 1e-12);
            assert!(f.zero.max_abs_diff(&z) < 1e-12);
            assert!(f.upper.max_abs_diff(&u) < 1e-12);
        }
    }
}

#[test]
fn three_blocks_match_explicit_formulas() {
    let mut rng = common::rng(12);
    for sizes in [[1, 1, 1], [2, 1, 2], [1, 3, 2], [3, 2, 1]] {
        let ctx = GradedContext::from_sizes(&sizes).unwrap();
        let a = common::dominant(&mut rng, sizes.iter().sum());
        let f = gauss_decompose(&ctx, &a, DEFAULT_GAUSS_TOL).unwrap();
        let (l, z, u) = three_block_oracle(&a, sizes);
        assert!(f.lower.max_abs_diff(&l) < 1e-12);
        assert!(f.zero.max_abs_diff(&z) < 1e-12);
        assert!(f.upper.max_abs_diff(&u) < 1e-12);
    }
}

#[test]
fn vanishing_leading_minor_is_reported() {
    let ctx = GradedContext::from_sizes(&[1, 1]).unwrap();
    let a = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 1.0]);
    assert!(gauss_decompose(&ctx, &a, DEFAULT_GAUSS_TOL).is_err());
    // The opposite ordering only needs the trailing block.
    let f = gauss_decompose_opposite(&ctx, &a, DEFAULT_GAUSS_TOL).unwrap();
    assert!(f.reconstruct().max_abs_diff(&a) < 1e-14);
}

fn sizes_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 2..=4).prop_filter("n <= 8", |s| s.iter().sum::<usize>() <= 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factors_reconstruct_and_have_structure(sizes in sizes_strategy(), seed in any::<u64>()) {
        let ctx = GradedContext::from_sizes(&sizes).unwrap();
        let n = ctx.dim();
        let a = common::dominant(&mut common::rng(seed), n);
        let f = gauss_decompose(&ctx, &a, DEFAULT_GAUSS_TOL).unwrap();
        prop_assert!(rel(&f.reconstruct(), &a) < 1e-10);
        prop_assert!(ctx.unit_triangular_defect(&f.lower, Part::Negative).unwrap() == 0.0);
        prop_assert!(ctx.unit_triangular_defect(&f.upper, Part::Positive).unwrap() == 0.0);
        prop_assert!(ctx.off_diagonal_defect(&f.zero).unwrap() == 0.0);
        let det_a = a.det().unwrap();
        let det_z = f.zero.det().unwrap();
        prop_assert!((det_a - det_z).norm() <= 1e-9 * det_a.norm());
        let g = gauss_decompose_opposite(&ctx, &a, DEFAULT_GAUSS_TOL).unwrap();
        prop_assert!(rel(&g.reconstruct(), &a) < 1e-10);
        prop_assert!(ctx.unit_triangular_defect(&g.upper, Part::Positive).unwrap() == 0.0);
        prop_assert!(ctx.unit_triangular_defect(&g.lower, Part::Negative).unwrap() == 0.0);
    }

    #[test]
    fn decomposition_is_unique_for_triangular_products(sizes in sizes_strategy(), seed in any::<u64>()) {
        let ctx = GradedContext::from_sizes(&sizes).unwrap();
        let n = ctx.dim();
        let mut rng = common::rng(seed);
        let eye = CMatrix::identity(n);
        let l = &eye + &ctx.project(&common::random_matrix(&mut rng, n, n, 1.0), Part::Negative).unwrap();
        let u = &eye + &ctx.project(&common::random_matrix(&mut rng, n, n, 1.0), Part::Positive).unwrap();
        let z = ctx.project_grade(&common::dominant(&mut rng, n), 0).unwrap();
        let a = &(&l * &z) * &u;
        let f = gauss_decompose(&ctx, &a, DEFAULT_GAUSS_TOL).unwrap();
        let scale = a.norm_max().max(1.0);
        prop_assert!(f.lower.max_abs_diff(&l) < 1e-9 * scale);
        prop_assert!(f.zero.max_abs_diff(&z) < 1e-9 * scale);
        prop_assert!(f.upper.max_abs_diff(&u) < 1e-9 * scale);
    }
}
