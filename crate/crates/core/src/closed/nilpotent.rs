use super::quadrature::{cumulative_simpson, simpson_panel};
use super::{guarded_inverse, BlockMonitor};
use crate::algebra::CMatrix;
use crate::error::{Error, Result};
use crate::flow::{staircase, uniform_axis, FieldOnGrid, MatrixField, Side, Trajectory};

/// Three-block system with `λ` strictly block-lower (`A = B = 0`) and
/// initial value `ψ_{>0}(0) = [[I, m12, m13], [0, I, m23], [0, 0, I]]`.
#[derive(Clone, Debug)]
pub struct ThreeBlockNilpotent {
    pub c21: MatrixField,
    pub c31: MatrixField,
    pub c32: MatrixField,
    pub m12: CMatrix,
    pub m13: CMatrix,
    pub m23: CMatrix,
}

/// The three unknown blocks of `ψ_{>0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeBlockU {
    pub u12: CMatrix,
    pub u13: CMatrix,
    pub u23: CMatrix,
}

impl ThreeBlockNilpotent {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.c21.shape().1, self.c21.shape().0, self.c31.shape().0)
    }

    fn validate(&self) -> Result<()> {
        let (n1, n2, n3) = self.sizes();
        let ok = self.c31.shape() == (n3, n1)
            && self.c32.shape() == (n3, n2)
            && self.m12.shape() == (n1, n2)
            && self.m13.shape() == (n1, n3)
            && self.m23.shape() == (n2, n3)
            && [&self.c21, &self.c31, &self.c32].iter().all(|f| f.dim_in() == 1);
        if ok {
            Ok(())
        } else {
            Err(Error::Shape("blocks do not form a 3-block system".into()))
        }
    }
}

/// Solution on `[0, x]` at `steps + 1` nodes, via the nested integrals
/// `S21 = ∫C21`, `S32 = ∫C32`, `S31 = ∫(C31 + S32 C21)`.
pub fn solve_three_block_nilpotent_path(p: &ThreeBlockNilpotent, x: f64, steps: usize) -> Result<Vec<(f64, ThreeBlockU)>> {
    p.validate()?;
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    let (n1, n2, _) = p.sizes();
    let fine = 2 * steps;
    let h = x / fine as f64;
    let sample = |f: &MatrixField| (0..=fine).map(|k| f.at(&[k as f64 * h])).collect::<Result<Vec<_>>>();
    let c21 = sample(&p.c21)?;
    let c31 = sample(&p.c31)?;
    let c32 = sample(&p.c32)?;
    let s21 = cumulative_simpson(&c21, h);
    let s32 = cumulative_simpson(&c32, h);
    let inner: Vec<CMatrix> = (0..=fine).map(|k| &c31[k] + &(&s32[k] * &c21[k])).collect();
    let s31 = cumulative_simpson(&inner, h);
    let mut monitor = BlockMonitor::default();
    let mut out = Vec::with_capacity(steps + 1);
    for k in (0..=fine).step_by(2) {
        let xk = k as f64 * h;
        let k1 = &(&CMatrix::identity(n1) + &(&p.m12 * &s21[k])) + &(&p.m13 * &s31[k]);
        let num12 = &p.m12 + &(&p.m13 * &s32[k]);
        let lead = &s21[k] + &(&p.m23 * &s31[k]);
        let k1inv = match guarded_inverse(&k1, &[xk]) {
            Ok(v) => v,
            Err(e) => {
                monitor.check(&[&k1], xk)?;
                return Err(e);
            }
        };
        let k2 = &(&CMatrix::identity(n2) + &(&p.m23 * &s32[k])) - &(&(&lead * &k1inv) * &num12);
        monitor.check(&[&k1, &k2], xk)?;
        let u12 = &k1inv * &num12;
        let u13 = &k1inv * &p.m13;
        let u23 = &guarded_inverse(&k2, &[xk])? * &(&p.m23 - &(&(&lead * &k1inv) * &p.m13));
        out.push((xk, ThreeBlockU { u12, u13, u23 }));
    }
    Ok(out)
}

pub fn solve_three_block_nilpotent(p: &ThreeBlockNilpotent, x: f64, steps: usize) -> Result<ThreeBlockU> {
    Ok(solve_three_block_nilpotent_path(p, x, steps)?.pop().expect("path is non-empty").1)
}

/// Tolerance of the gradient (curl) check `∂_i C_j = ∂_j C_i`.
pub const CURL_TOL: f64 = 1e-8;

/// `max ‖∂_i C_j − ∂_j C_i‖` over `points`.
pub fn curl_residual(c: &MatrixField, points: &[Vec<f64>]) -> Result<f64> {
    let d = c.components();
    let mut worst = 0.0f64;
    for x in points {
        for i in 0..d {
            for j in i + 1..d {
                let r = &c.partial(j, i, x)? - &c.partial(i, j, x)?;
                worst = worst.max(r.norm_max());
            }
        }
    }
    Ok(worst)
}

fn check_gradient(c: &MatrixField, points: &[Vec<f64>]) -> Result<()> {
    let residual = curl_residual(c, points)?;
    if residual > CURL_TOL {
        return Err(Error::NotIntegrable {
            residual,
            tolerance: CURL_TOL,
        });
    }
    Ok(())
}

fn check_md_shapes(c: &MatrixField, m: &CMatrix) -> Result<()> {
    let (n2, n1) = c.shape();
    if c.components() != c.dim_in() || m.shape() != (n1, n2) {
        return Err(Error::Shape("C_i must be n2 x n1 with one component per coordinate; m n1 x n2".into()));
    }
    Ok(())
}

fn nilpotent_u(m: &CMatrix, s: &CMatrix, x: &[f64]) -> Result<CMatrix> {
    let k = &CMatrix::identity(m.rows()) + &(m * s);
    Ok(&guarded_inverse(&k, x)? * m)
}

/// `U = (I + mS)⁻¹ m` at `point`, where `∂_i S = C_i` and `S(0) = 0`. `S` is
/// integrated along the staircase path from the origin (coordinate 0 first)
/// with `steps` Simpson panels per leg.
pub fn solve_md_nilpotent(c: &MatrixField, m: &CMatrix, point: &[f64], steps: usize) -> Result<CMatrix> {
    check_md_shapes(c, m)?;
    if point.len() != c.dim_in() {
        return Err(Error::Shape("point dimension".into()));
    }
    let steps = steps.max(1);
    let (n2, n1) = c.shape();
    let mut s = CMatrix::zeros(n2, n1);
    let mut x = vec![0.0; point.len()];
    let mut visited = vec![x.clone()];
    for dir in 0..point.len() {
        let h = point[dir] / steps as f64;
        for k in 0..steps {
            x[dir] = k as f64 * h;
            let f0 = c.eval(dir, &x)?;
            x[dir] += 0.5 * h;
            let fm = c.eval(dir, &x)?;
            x[dir] = (k + 1) as f64 * h;
            let f1 = c.eval(dir, &x)?;
            s += &simpson_panel(&f0, &fm, &f1, h);
            visited.push(x.clone());
        }
        x[dir] = point[dir];
    }
    check_gradient(c, &visited)?;
    nilpotent_u(m, &s, point)
}

/// Grid version of [`solve_md_nilpotent`] with `S` vanishing at the first
/// node of every axis.
pub fn solve_md_nilpotent_grid(c: &MatrixField, m: &CMatrix, axes: &[Vec<f64>], substeps: usize) -> Result<FieldOnGrid> {
    check_md_shapes(c, m)?;
    if axes.len() != c.dim_in() {
        return Err(Error::Shape("grid dimension".into()));
    }
    let probe = FieldOnGrid::from_fn(axes.to_vec(), |_| Ok(CMatrix::zeros(1, 1)))?;
    check_gradient(c, &probe.points())?;
    let (n2, n1) = c.shape();
    let order: Vec<usize> = (0..axes.len()).collect();
    let s = staircase(axes, &order, substeps, CMatrix::zeros(n2, n1), |dir, x, h, s| {
        let mut y = x.to_vec();
        let f0 = c.eval(dir, &y)?;
        y[dir] = x[dir] + 0.5 * h;
        let fm = c.eval(dir, &y)?;
        y[dir] = x[dir] + h;
        let f1 = c.eval(dir, &y)?;
        Ok(s + &simpson_panel(&f0, &fm, &f1, h))
    })?;
    let values = s
        .iter()
        .enumerate()
        .map(|(k, sk)| nilpotent_u(m, sk, &probe.point(k)))
        .collect::<Result<Vec<_>>>()?;
    FieldOnGrid::new(axes.to_vec(), values)
}

/// `U` of the three-block system as a trajectory of `ψ_{>0}` matrices.
pub fn three_block_trajectory(p: &ThreeBlockNilpotent, x: f64, steps: usize) -> Result<Trajectory> {
    let (n1, n2, n3) = p.sizes();
    let n = n1 + n2 + n3;
    let path = solve_three_block_nilpotent_path(p, x, steps)?;
    let values = path
        .iter()
        .map(|(_, u)| {
            let mut y = CMatrix::identity(n);
            y.set_submatrix(0, n1, &u.u12);
            y.set_submatrix(0, n1 + n2, &u.u13);
            y.set_submatrix(n1, n1 + n2, &u.u23);
            y
        })
        .collect();
    Ok(Trajectory {
        nodes: uniform_axis(0.0, x, steps + 1),
        values,
        side: Side::Right,
    })
}
