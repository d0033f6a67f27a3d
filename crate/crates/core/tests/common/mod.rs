//! Reference values computed independently of the library: quadratures and
//! a radial shooting integrator.

#![allow(dead_code)]

use std::f64::consts::PI;

const GAUSS5: [(f64, f64); 5] = [
    (0.0, 128.0 / 225.0),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Composite 5-point Gauss-Legendre rule on `(a, b)`.
pub fn gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let w = (b - a) / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        let mid = a + (i as f64 + 0.5) * w;
        for (x, wt) in GAUSS5 {
            sum += 0.5 * w * wt * f(mid + 0.5 * w * x);
        }
    }
    sum
}

/// `pi_p = 2 int_0^1 (1 - s^p)^(-1/p) ds`, with `1 - s = y^(p/(p-1))`
/// removing the endpoint singularity.
pub fn pi_p(p: f64) -> f64 {
    let m = p / (p - 1.0);
    let f = |y: f64| {
        let gap = -(p * (-y.powf(m)).ln_1p()).exp_m1();
        gap.powf(-1.0 / p) * m * y.powf(m - 1.0)
    };
    2.0 * gauss(f, 0.0, 1.0, 4000)
}

/// First Dirichlet eigenvalue of the one-dimensional p-Laplacian on `(0, L)`.
pub fn interval_eigenvalue(p: f64, length: f64) -> f64 {
    (p - 1.0) * (pi_p(p) / length).powf(p)
}

/// First positive zero of `J_0` by RK4 shooting of `u'' + u'/r + u = 0`
/// from the series start `u = 1 - r^2/4` at a small radius.
pub fn bessel_j0_first_zero() -> f64 {
    let rhs = |r: f64, y: [f64; 2]| [y[1], -y[1] / r - y[0]];
    let mut r = 1e-4;
    let mut y = [1.0 - r * r / 4.0, -r / 2.0];
    let dr = 1e-5;
    loop {
        let k1 = rhs(r, y);
        let k2 = rhs(r + dr / 2.0, [y[0] + dr / 2.0 * k1[0], y[1] + dr / 2.0 * k1[1]]);
        let k3 = rhs(r + dr / 2.0, [y[0] + dr / 2.0 * k2[0], y[1] + dr / 2.0 * k2[1]]);
        let k4 = rhs(r + dr, [y[0] + dr * k3[0], y[1] + dr * k3[1]]);
        let next = [
            y[0] + dr / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + dr / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if next[0] <= 0.0 {
            // linear interpolation inside the last step
            return r + dr * y[0] / (y[0] - next[0]);
        }
        y = next;
        r += dr;
    }
}

/// Surface area of the unit sphere in `R^N`, `N` in 2..=3.
pub fn unit_sphere_area(dim: usize) -> f64 {
    match dim {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("dimension {dim}"),
    }
}

/// `Cap_p(closed B_a, B_b)` from the radial Euler-Lagrange equation: the flux
/// `sigma r^(N-1) |u'|^(p-1)` is constant, so the capacity is
/// `sigma (int_a^b r^(-(N-1)/(p-1)) dr)^(1-p)`, evaluated by quadrature.
pub fn radial_capacity_quadrature(a: f64, b: f64, p: f64, dim: usize) -> f64 {
    let e = -(dim as f64 - 1.0) / (p - 1.0);
    let integral = gauss(|r| r.powf(e), a, b, 2000);
    unit_sphere_area(dim) * integral.powf(1.0 - p)
}

/// First-order Richardson extrapolation from spacings `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    2.0 * fine - coarse
}
