use crate::algebra::CMatrix;

/// Running integral of uniformly spaced samples `f_0..f_{2N}` (spacing `h`),
/// returned at every node. Even nodes use composite Simpson; odd nodes add
/// the three-point partial-panel rule `h/12 (5f_0 + 8f_1 − f_2)`.
pub fn cumulative_simpson(f: &[CMatrix], h: f64) -> Vec<CMatrix> {
    assert!(f.len() % 2 == 1, "cumulative Simpson needs an even number of intervals");
    let (r, c) = f[0].shape();
    let mut out = Vec::with_capacity(f.len());
    let mut acc = CMatrix::zeros(r, c);
    out.push(acc.clone());
    for k in (0..f.len() - 1).step_by(2) {
        let (f0, f1, f2) = (&f[k], &f[k + 1], &f[k + 2]);
        let half = &(&f0.scale_real(5.0) + &f1.scale_real(8.0)) - f2;
        out.push(&acc + &half.scale_real(h / 12.0));
        let full = &(f0 + f2) + &f1.scale_real(4.0);
        acc += &full.scale_real(h / 3.0);
        out.push(acc.clone());
    }
    out
}

/// Simpson's rule on a single panel `[a, a + h]`.
pub fn simpson_panel(f0: &CMatrix, fm: &CMatrix, f1: &CMatrix, h: f64) -> CMatrix {
    (&(f0 + f1) + &fm.scale_real(4.0)).scale_real(h / 6.0)
}
