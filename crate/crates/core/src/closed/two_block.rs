use super::quadrature::cumulative_simpson;
use super::{guarded_inverse, BlockMonitor};
use crate::algebra::CMatrix;
use crate::error::{Error, Result};
use crate::flow::{solve_linear_1d, uniform_axis, MatrixField, Method, Side, Trajectory};

/// Block-lower coefficients `λ = [[A, 0], [C, D]]` with initial value `U(0) = m`.
#[derive(Clone, Debug)]
pub struct TriangularCoeffs1D {
    pub a: MatrixField,
    pub c: MatrixField,
    pub d: MatrixField,
    pub m: CMatrix,
}

impl TriangularCoeffs1D {
    pub fn new(a: MatrixField, c: MatrixField, d: MatrixField, m: CMatrix) -> Result<Self> {
        let n1 = a.shape().0;
        let n2 = d.shape().0;
        let ok = a.shape() == (n1, n1)
            && d.shape() == (n2, n2)
            && c.shape() == (n2, n1)
            && m.shape() == (n1, n2)
            && [&a, &c, &d].iter().all(|f| f.dim_in() == 1);
        if !ok {
            return Err(Error::Shape("A, C, D, m do not form a 2-block system".into()));
        }
        Ok(Self { a, c, d, m })
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.a.shape().0, self.d.shape().0)
    }
}

fn fine_flow(field: &MatrixField, x: f64, fine: usize) -> Result<Vec<CMatrix>> {
    let n = field.shape().0;
    Ok(solve_linear_1d(field, &CMatrix::identity(n), (0.0, x), fine, Side::Right, Method::Rk4)?.values)
}

fn coarse_trajectory(x: f64, steps: usize, values: Vec<CMatrix>) -> Trajectory {
    Trajectory {
        nodes: uniform_axis(0.0, x, steps + 1),
        values,
        side: Side::Right,
    }
}

/// `U = Q⁻¹ (I + mS)⁻¹ m R` on `[0, x]` with `steps` Simpson panels, where
/// `Q' = QA`, `R' = RD` (`Q(0) = R(0) = I`) and `S = ∫ R C Q⁻¹`.
pub fn solve_b_zero_path(c: &TriangularCoeffs1D, x: f64, steps: usize) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    let fine = 2 * steps;
    let h = x / fine as f64;
    let q = fine_flow(&c.a, x, fine)?;
    let r = fine_flow(&c.d, x, fine)?;
    let qinv = q.iter().map(CMatrix::inverse).collect::<Result<Vec<_>>>()?;
    let integrand = (0..=fine)
        .map(|k| Ok(&(&r[k] * &c.c.at(&[k as f64 * h])?) * &qinv[k]))
        .collect::<Result<Vec<_>>>()?;
    let s = cumulative_simpson(&integrand, h);
    let (n1, _) = c.sizes();
    let mut monitor = BlockMonitor::default();
    let mut values = Vec::with_capacity(steps + 1);
    for k in (0..=fine).step_by(2) {
        let xk = k as f64 * h;
        let factor = &CMatrix::identity(n1) + &(&c.m * &s[k]);
        monitor.check(&[&factor], xk)?;
        let inv = guarded_inverse(&factor, &[xk])?;
        values.push(&(&(&qinv[k] * &inv) * &c.m) * &r[k]);
    }
    Ok(coarse_trajectory(x, steps, values))
}

pub fn solve_b_zero(c: &TriangularCoeffs1D, x: f64, steps: usize) -> Result<CMatrix> {
    Ok(solve_b_zero_path(c, x, steps)?.last().clone())
}

/// `U = (F + H + m(F − H))⁻¹ (F − H + m(F + H))` with `F`, `H` the
/// path-ordered exponentials of `B` and `−B`; solves `U' = B − UBU`.
pub fn solve_cb_equal_path(b: &MatrixField, m: &CMatrix, x: f64, steps: usize) -> Result<Trajectory> {
    let n = b.shape().0;
    if b.shape() != (n, n) || m.shape() != (n, n) || b.dim_in() != 1 {
        return Err(Error::Shape("C = B needs square B and m of equal size".into()));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    let f = solve_linear_1d(b, &CMatrix::identity(n), (0.0, x), steps, Side::Right, Method::Rk4)?;
    let minus_b = b.map(b.shape(), |_, _, v| -v);
    let hh = solve_linear_1d(&minus_b, &CMatrix::identity(n), (0.0, x), steps, Side::Right, Method::Rk4)?;
    let mut monitor = BlockMonitor::default();
    let mut values = Vec::with_capacity(steps + 1);
    for (k, (fk, hk)) in f.values.iter().zip(&hh.values).enumerate() {
        let xk = f.nodes[k];
        let sum = fk + hk;
        let diff = fk - hk;
        let left = &sum + &(m * &diff);
        monitor.check(&[&left], xk)?;
        values.push(&guarded_inverse(&left, &[xk])? * &(&diff + &(m * &sum)));
    }
    Ok(coarse_trajectory(x, steps, values))
}

pub fn solve_cb_equal(b: &MatrixField, m: &CMatrix, x: f64, steps: usize) -> Result<CMatrix> {
    Ok(solve_cb_equal_path(b, m, x, steps)?.last().clone())
}

/// Constant off-diagonal coefficients `λ = [[0, B], [C, 0]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantBC {
    pub b: CMatrix,
    pub c: CMatrix,
    pub m: CMatrix,
}

/// Relative singular-value threshold for the nondegeneracy of `B` and `C`.
pub const NONDEGENERACY_TOL: f64 = 1e-12;

impl ConstantBC {
    pub fn new(b: CMatrix, c: CMatrix, m: CMatrix) -> Result<Self> {
        let n = b.rows();
        if b.shape() != (n, n) || c.shape() != (n, n) || m.shape() != (n, n) {
            return Err(Error::Shape("constant B, C family needs equal square blocks".into()));
        }
        for (name, x) in [("B", &b), ("C", &c)] {
            let sv = x.singular_values();
            if !(sv[n - 1] > NONDEGENERACY_TOL * sv[0]) {
                return Err(Error::Singular(format!("{name} is degenerate")));
            }
        }
        Ok(Self { b, c, m })
    }

    /// `ψ(x) = exp(x [[0, B], [C, 0]])`: the cosh/sinh block matrix, without
    /// square roots.
    pub fn flow(&self, x: f64) -> CMatrix {
        let n = self.b.rows();
        let mut gen = CMatrix::zeros(2 * n, 2 * n);
        gen.set_submatrix(0, n, &self.b);
        gen.set_submatrix(n, 0, &self.c);
        gen.scale_real(x).matexp()
    }
}

/// `U = (ψ_11 + m ψ_21)⁻¹ (ψ_12 + m ψ_22)` for `ψ = exp(x [[0, B], [C, 0]])`.
pub fn solve_constant_bc(c: &ConstantBC, x: f64) -> Result<CMatrix> {
    let n = c.b.rows();
    let psi = c.flow(x);
    let blk = |r: usize, s: usize| psi.submatrix(r * n, s * n, n, n);
    let left = &blk(0, 0) + &(&c.m * &blk(1, 0));
    let right = &blk(0, 1) + &(&c.m * &blk(1, 1));
    Ok(&guarded_inverse(&left, &[x])? * &right)
}
