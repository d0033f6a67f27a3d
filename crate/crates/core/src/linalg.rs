//! Matrix-free Jacobi-preconditioned conjugate gradients on masked vectors.

/// Outcome of a conjugate-gradient solve.
#[derive(Clone, Copy, Debug)]
pub struct CgReport {
    pub iterations: usize,
    /// Final residual norm relative to the right-hand side.
    pub relative_residual: f64,
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` on the entries where `free` is true, starting from the
/// given `x`. Entries outside `free` are held at zero in every vector the
/// operator sees, and `apply` may write anything there.
///
/// `A` must be symmetric positive definite on the free subspace; `diag` is
/// its diagonal. Stops once `|r| <= rtol |b|` or after `max_iter` steps.
pub fn pcg(
    apply: impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    free: &[bool],
    b: &[f64],
    x: &mut [f64],
    rtol: f64,
    max_iter: usize,
) -> CgReport {
    let n = b.len();
    let inv_diag: Vec<f64> = diag
        .iter()
        .zip(free)
        .map(|(&d, &f)| if f && d > 0.0 { 1.0 / d } else { 0.0 })
        .collect();
    for (xi, &f) in x.iter_mut().zip(free) {
        if !f {
            *xi = 0.0;
        }
    }
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for i in 0..n {
        r[i] = if free[i] { b[i] - r[i] } else { 0.0 };
    }
    let b_norm = b.iter().zip(free).filter(|(_, &f)| f).map(|(v, _)| v * v).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return CgReport { iterations: 0, relative_residual: 0.0 };
    }
    let target = rtol * b_norm;
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut dir = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = dot(&r, &r).sqrt();
    let mut it = 0;
    while it < max_iter && res > target {
        apply(&dir, &mut q);
        for (qi, &f) in q.iter_mut().zip(free) {
            if !f {
                *qi = 0.0;
            }
        }
        let curvature = dot(&dir, &q);
        if curvature <= 0.0 {
            break;
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * dir[i];
            r[i] -= alpha * q[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            dir[i] = z[i] + beta * dir[i];
        }
        res = dot(&r, &r).sqrt();
        it += 1;
    }
    CgReport { iterations: it, relative_residual: res / b_norm }
}
