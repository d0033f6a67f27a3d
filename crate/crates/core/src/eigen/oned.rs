//! First eigenvalue of the one-dimensional p-Laplacian by shooting.
//!
//! The Dirichlet problem on `(0, L)` is written as the first-order system
//! `u' = |v|^(1/(p-1)) sign v`, `v' = -lambda |u|^(p-2) u` with `u(0) = 0`,
//! `v(0) = 1`. For `lambda` below the first eigenvalue `u` stays positive on
//! `(0, L]`; just above it `u` has crossed zero before `L`. Bisection on that
//! predicate brackets the eigenvalue.

use crate::error::{Error, Result};

fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(e).copysign(x)
    }
}

/// Dormand-Prince 5(4) tableau; the system is autonomous, so the nodes are
/// not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates the shooting system on `[0, length]`; returns true iff `u`
/// changes sign before the end.
fn crosses_before(p: f64, lambda: f64, length: f64, max_step: f64, tol: f64) -> bool {
    let rhs = |y: [f64; 2]| [signed_pow(y[1], 1.0 / (p - 1.0)), -lambda * signed_pow(y[0], p - 1.0)];
    let mut x = 0.0;
    let mut y = [0.0, 1.0];
    let mut step = max_step.min(1e-3 * length);
    let mut k = [[0.0; 2]; 7];
    while x < length {
        step = step.min(length - x);
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += step * A[s][j] * kj[0];
                ys[1] += step * A[s][j] * kj[1];
            }
            k[s] = rhs(ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for d in 0..2 {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B5[s] * k[s][d];
                lo += B4[s] * k[s][d];
            }
            y5[d] += step * hi;
            let scale = tol * (1.0 + y[d].abs().max(y5[d].abs()));
            err = err.max((step * (hi - lo)).abs() / scale);
        }
        if err <= 1.0 {
            x += step;
            y = y5;
            if y[0] < 0.0 {
                return true;
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        step = (step * factor).min(max_step);
    }
    false
}

/// First Dirichlet eigenvalue of `-(|u'|^(p-2) u')' = lambda |u|^(p-2) u` on
/// `(0, length)`. `resolution` bounds the integrator step by
/// `length / resolution`.
pub fn solve_1d(p: f64, length: f64, resolution: usize) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent must exceed 1, got {p}")));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidArgument(format!("length must be positive, got {length}")));
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let max_step = length / resolution as f64;
    let tol = 1e-13;
    let crosses = |lambda: f64| crosses_before(p, lambda, length, max_step, tol);

    let mut lo = 1e-12;
    if crosses(lo) {
        return Err(Error::Bracket(format!("u crosses zero already at lambda = {lo}")));
    }
    // the positive window below the second eigenvalue spans a factor 2^p > 1.5
    let mut hi = 1.0 / length.powf(p);
    let mut doublings = 0;
    while !crosses(hi) {
        lo = hi;
        hi *= 1.5;
        doublings += 1;
        if doublings > 400 {
            return Err(Error::Bracket("no sign change found".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if crosses(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
