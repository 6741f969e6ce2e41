#![allow(dead_code)]

use graded_riccati::algebra::CMatrix;
use graded_riccati::flow::{MatrixField, MatrixPolynomial, Monomial};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
    })
}

pub fn random_real(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.gen_range(-scale..scale), 0.0))
}

/// Diagonally dominated random matrix; all leading minors are well
/// conditioned.
pub fn dominant(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    &random_matrix(rng, n, n, 1.0) + &CMatrix::identity(n).scale_real(n as f64 + 1.0)
}

/// Random matrix polynomial field with `components` components in
/// `dim_in` variables, total degree ≤ `degree`.
pub fn random_poly_field(
    rng: &mut ChaCha8Rng,
    dim_in: usize,
    components: usize,
    shape: (usize, usize),
    degree: u32,
    scale: f64,
) -> MatrixField {
    let polys = (0..components)
        .map(|_| {
            let mut terms = Vec::new();
            for powers in exponents(dim_in, degree) {
                terms.push(Monomial {
                    powers,
                    coeff: random_real(rng, shape.0, shape.1, scale),
                });
            }
            MatrixPolynomial::new(dim_in, shape, terms).unwrap()
        })
        .collect();
    MatrixField::from_polynomials(polys).unwrap()
}

fn exponents(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    if dim == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in 0..=degree {
        for mut rest in exponents(dim - 1, degree - p) {
            rest.insert(0, p);
            out.push(rest);
        }
    }
    out
}

pub fn poly(dim: usize, shape: (usize, usize), terms: &[(&[u32], &[f64])]) -> MatrixField {
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
