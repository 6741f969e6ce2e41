//! Block Z-gradations of gl(n, C).
//!
//! A partition `n = n_1 + … + n_p` splits an `n x n` matrix into blocks
//! `x_rs`; block `(r, s)` has grade `s − r`. Grade-zero blocks form the
//! block diagonal, positive grades sit above it and negative grades below.

use serde::{Deserialize, Serialize};

use super::CMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct BlockPartition {
    sizes: Vec<usize>,
}

impl BlockPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a gradation needs at least two blocks, got {}",
                sizes.len()
            )));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidInput("block sizes must be positive".into()));
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn dim(&self) -> usize {
        self.sizes.iter().sum()
    }
}

impl TryFrom<Vec<usize>> for BlockPartition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BlockPartition> for Vec<usize> {
    fn from(p: BlockPartition) -> Vec<usize> {
        p.sizes
    }
}

/// Which grades a projection keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Part {
    Negative,
    Zero,
    Positive,
    NonPositive,
}

impl Part {
    fn keeps(self, grade: isize) -> bool {
        match self {
            Part::Negative => grade < 0,
            Part::Zero => grade == 0,
            Part::Positive => grade > 0,
            Part::NonPositive => grade <= 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedContext {
    partition: BlockPartition,
    offsets: Vec<usize>,
}

impl GradedContext {
    pub fn new(partition: BlockPartition) -> Self {
        let mut offsets = Vec::with_capacity(partition.blocks() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &s in partition.sizes() {
            acc += s;
            offsets.push(acc);
        }
        Self { partition, offsets }
    }

    /// Shorthand for `GradedContext::new(BlockPartition::new(sizes)?)`.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        Ok(Self::new(BlockPartition::new(sizes.to_vec())?))
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn sizes(&self) -> &[usize] {
        self.partition.sizes()
    }

    pub fn blocks(&self) -> usize {
        self.partition.blocks()
    }

    pub fn dim(&self) -> usize {
        self.partition.dim()
    }

    /// First row/column of block `r`.
    pub fn offset(&self, r: usize) -> usize {
        self.offsets[r]
    }

    pub fn grade(&self, r: usize, s: usize) -> isize {
        s as isize - r as isize
    }

    /// Block index containing row/column `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.offsets[1..].iter().position(|&end| i < end).unwrap_or(self.blocks() - 1)
    }

    /// The context with block order reversed.
    pub fn reversed(&self) -> GradedContext {
        let mut sizes = self.sizes().to_vec();
        sizes.reverse();
        GradedContext::new(BlockPartition { sizes })
    }

    pub(crate) fn check_square(&self, x: &CMatrix) -> Result<()> {
        let n = self.dim();
        if x.rows() != n || x.cols() != n {
            return Err(Error::Shape(format!(
                "expected {n}x{n} for partition {:?}, got {}x{}",
                self.sizes(),
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }

    fn check_block(&self, r: usize, s: usize) -> Result<()> {
        let p = self.blocks();
        if r >= p || s >= p {
            return Err(Error::Index(format!("block ({r}, {s}) with {p} blocks")));
        }
        Ok(())
    }

    /// Keeps the blocks whose grade matches `part` and zeroes the rest.
    pub fn project(&self, x: &CMatrix, part: Part) -> Result<CMatrix> {
        self.check_square(x)?;
        Ok(self.mask(x, |g| part.keeps(g)))
    }

    /// Keeps only the blocks of grade exactly `grade`.
    pub fn project_grade(&self, x: &CMatrix, grade: isize) -> Result<CMatrix> {
        self.check_square(x)?;
        Ok(self.mask(x, |g| g == grade))
    }

    fn mask(&self, x: &CMatrix, keep: impl Fn(isize) -> bool) -> CMatrix {
        let n = self.dim();
        let rb: Vec<usize> = (0..n).map(|i| self.block_of(i)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            if keep(rb[j] as isize - rb[i] as isize) {
                x[(i, j)]
            } else {
                num_complex::Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn block_get(&self, x: &CMatrix, r: usize, s: usize) -> Result<CMatrix> {
        self.check_square(x)?;
        self.check_block(r, s)?;
        let sz = self.sizes();
        Ok(x.submatrix(self.offsets[r], self.offsets[s], sz[r], sz[s]))
    }

    pub fn block_set(&self, x: &mut CMatrix, r: usize, s: usize, value: &CMatrix) -> Result<()> {
        self.check_square(x)?;
        self.check_block(r, s)?;
        let sz = self.sizes();
        if value.shape() != (sz[r], sz[s]) {
            return Err(Error::Shape(format!(
                "block ({r}, {s}) is {}x{}, value is {}x{}",
                sz[r],
                sz[s],
                value.rows(),
                value.cols()
            )));
        }
        x.set_submatrix(self.offsets[r], self.offsets[s], value);
        Ok(())
    }

    /// Assembles a matrix from a `p x p` grid of blocks.
    pub fn from_blocks(&self, blocks: &[Vec<CMatrix>]) -> Result<CMatrix> {
        let p = self.blocks();
        if blocks.len() != p || blocks.iter().any(|r| r.len() != p) {
            return Err(Error::Shape(format!("need a {p}x{p} grid of blocks")));
        }
        let mut x = CMatrix::zeros(self.dim(), self.dim());
        for (r, row) in blocks.iter().enumerate() {
            for (s, b) in row.iter().enumerate() {
                self.block_set(&mut x, r, s, b)?;
            }
        }
        Ok(x)
    }

    /// Embeds an off-diagonal block into an otherwise zero `n x n` matrix.
    pub fn embed(&self, r: usize, s: usize, value: &CMatrix) -> Result<CMatrix> {
        let mut x = CMatrix::zeros(self.dim(), self.dim());
        self.block_set(&mut x, r, s, value)?;
        Ok(x)
    }

    /// Block-diagonal matrix from its diagonal blocks.
    pub fn block_diag(&self, diag: &[CMatrix]) -> Result<CMatrix> {
        if diag.len() != self.blocks() {
            return Err(Error::Shape(format!(
                "{} diagonal blocks for {} blocks",
                diag.len(),
                self.blocks()
            )));
        }
        let mut x = CMatrix::zeros(self.dim(), self.dim());
        for (r, b) in diag.iter().enumerate() {
            self.block_set(&mut x, r, r, b)?;
        }
        Ok(x)
    }

    /// Largest deviation of `x` from the unit block-upper (`part = Positive`)
    /// or unit block-lower (`part = Negative`) shape.
    pub fn unit_triangular_defect(&self, x: &CMatrix, part: Part) -> Result<f64> {
        self.check_square(x)?;
        let eye = CMatrix::identity(self.dim());
        let nil = self.project(x, part)?;
        Ok((&(x - &eye) - &nil).norm_max())
    }

    /// Largest entry outside the block diagonal.
    pub fn off_diagonal_defect(&self, x: &CMatrix) -> Result<f64> {
        Ok((x - &self.project(x, Part::Zero)?).norm_max())
    }

    /// Block-reversal permutation applied on both sides: block `(r, s)` of
    /// the result is block `(p−1−r, p−1−s)` of `x`. Result is graded by
    /// [`GradedContext::reversed`].
    pub fn reverse_blocks(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check_square(x)?;
        let rev = self.reversed();
        let p = self.blocks();
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for r in 0..p {
            for s in 0..p {
                let b = self.block_get(x, p - 1 - r, p - 1 - s)?;
                rev.block_set(&mut out, r, s, &b)?;
            }
        }
        Ok(out)
    }
}

/// Inverse of a unit block-triangular matrix `I + N` with nilpotent `N`
/// of nilpotency order at most `p`: `Σ_{k<p} (−N)^k`.
pub fn unit_triangular_inverse(ctx: &GradedContext, y: &CMatrix) -> Result<CMatrix> {
    ctx.check_square(y)?;
    let n = ctx.dim();
    let eye = CMatrix::identity(n);
    let neg_nil = &eye - y;
    let mut term = eye.clone();
    let mut acc = eye;
    for _ in 1..ctx.blocks() {
        term = &term * &neg_nil;
        acc += &term;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn positive_part_of_two_by_two() {
        let ctx = GradedContext::from_sizes(&[1, 1]).unwrap();
        let x = CMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let p = ctx.project(&x, Part::Positive).unwrap();
        assert_eq!(p, CMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]));
    }

    #[test]
    fn zero_projects_to_zero() {
        let ctx = GradedContext::from_sizes(&[2, 1, 3]).unwrap();
        let z = CMatrix::zeros(6, 6);
        for part in [Part::Negative, Part::Zero, Part::Positive, Part::NonPositive] {
            assert_eq!(ctx.project(&z, part).unwrap(), z);
        }
    }

    #[test]
    fn negative_part_of_ones_in_three_blocks() {
        let ctx = GradedContext::from_sizes(&[1, 1, 1]).unwrap();
        let ones = CMatrix::from_real(3, 3, &[1.0; 9]);
        let neg = ctx.project(&ones, Part::Negative).unwrap();
        let expected = CMatrix::from_real(3, 3, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
        assert_eq!(neg, expected);
    }

    #[test]
    fn projection_shape_error() {
        let ctx = GradedContext::from_sizes(&[1, 1]).unwrap();
        assert!(matches!(
            ctx.project(&CMatrix::zeros(3, 3), Part::Zero),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn block_access() {
        let ctx = GradedContext::from_sizes(&[2, 1]).unwrap();
        let x = CMatrix::from_real(3, 3, &[1., 2., 3., 4., 5., 6., 7., 8., 9.]);
        assert_eq!(ctx.block_get(&x, 0, 1).unwrap(), CMatrix::from_real(2, 1, &[3.0, 6.0]));
        let mut y = x.clone();
        let v = CMatrix::from_real(1, 2, &[-1.0, -2.0]);
        ctx.block_set(&mut y, 1, 0, &v).unwrap();
        assert_eq!(ctx.block_get(&y, 1, 0).unwrap(), v);
        let eye = CMatrix::identity(3);
        assert_eq!(ctx.block_get(&eye, 0, 0).unwrap(), CMatrix::identity(2));
        assert!(matches!(ctx.block_get(&x, 2, 0), Err(Error::Index(_))));
        assert!(matches!(ctx.block_set(&mut y, 0, 0, &v), Err(Error::Shape(_))));
    }

    #[test]
    fn partition_validation() {
        assert!(BlockPartition::new(vec![3]).is_err());
        assert!(BlockPartition::new(vec![1, 0]).is_err());
        let p: BlockPartition = serde_json::from_str("[2, 1]").unwrap();
        assert_eq!(p.dim(), 3);
        assert!(serde_json::from_str::<BlockPartition>("[2]").is_err());
    }

    #[test]
    fn unit_triangular_inverse_is_exact_inverse() {
        let ctx = GradedContext::from_sizes(&[1, 2, 1]).unwrap();
        let mut y = CMatrix::identity(4);
        for (i, j, v) in [(0, 1, 2.0), (0, 3, -1.0), (1, 3, 0.5), (2, 3, 3.0), (0, 2, 1.5)] {
            y[(i, j)] = Complex64::new(v, 0.3);
        }
        let inv = unit_triangular_inverse(&ctx, &y).unwrap();
        assert!((&y * &inv).max_abs_diff(&CMatrix::identity(4)) < 1e-14);
    }

    #[test]
    fn reverse_blocks_swaps_upper_and_lower() {
        let ctx = GradedContext::from_sizes(&[2, 1]).unwrap();
        let x = CMatrix::from_real(3, 3, &[1., 2., 3., 4., 5., 6., 7., 8., 9.]);
        let r = ctx.reverse_blocks(&x).unwrap();
        assert_eq!(r, CMatrix::from_real(3, 3, &[9., 7., 8., 3., 1., 2., 6., 4., 5.]));
        let rev = ctx.reversed();
        assert_eq!(rev.reverse_blocks(&r).unwrap(), x);
    }
}
