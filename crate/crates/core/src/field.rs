//! Grid fields and the forward-difference operators acting on them.

use crate::error::{Error, Result};
use crate::geometry::{GridDomain, Point};
use std::sync::Arc;

/// Real values on the lattice of a domain, zero on every false cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
}

impl ScalarField {
    /// Wraps `values`; fails if any value is non-finite or a false cell
    /// carries a nonzero value.
    pub fn new(domain: Arc<GridDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::InvalidArgument(format!(
                "field has {} values, domain has {} cells",
                values.len(),
                domain.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite field value {v}")));
        }
        if values.iter().zip(domain.mask()).any(|(&v, &m)| !m && v != 0.0) {
            return Err(Error::InvalidArgument("nonzero value outside the domain".into()));
        }
        Ok(Self { domain, values })
    }

    pub fn zeros(domain: Arc<GridDomain>) -> Self {
        let values = vec![0.0; domain.len()];
        Self { domain, values }
    }

    /// Samples `f` at domain cell centers; false cells get 0.
    pub fn from_fn(domain: Arc<GridDomain>, f: impl Fn(&Point) -> f64) -> Self {
        let values = (0..domain.len())
            .map(|i| if domain.is_inside(i) { f(&domain.center(i)) } else { 0.0 })
            .collect();
        Self { domain, values }
    }

    /// Like [`ScalarField::new`] but zeroes false cells instead of rejecting them.
    pub fn masked(domain: Arc<GridDomain>, mut values: Vec<f64>) -> Result<Self> {
        if values.len() == domain.len() {
            for (v, &m) in values.iter_mut().zip(domain.mask()) {
                if !m {
                    *v = 0.0;
                }
            }
        }
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { domain: self.domain.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn min(&self) -> f64 {
        self.domain.inside_cells().map(|i| self.values[i]).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Discrete `L^q` norm `(h^N sum |u|^q)^(1/q)`.
    pub fn lq_norm(&self, q: f64) -> f64 {
        let hn = self.domain.h().powi(self.domain.dim() as i32);
        (hn * self.values.iter().map(|v| v.abs().powf(q)).sum::<f64>()).powf(1.0 / q)
    }
}

/// `s^(p/2)`, exact for the common quadratic case.
#[inline]
pub(crate) fn pow_half(s: f64, p: f64) -> f64 {
    if p == 2.0 {
        s
    } else if s == 0.0 {
        0.0
    } else {
        s.powf(0.5 * p)
    }
}

/// Forward differences on a lattice restricted to the cells whose stencil
/// touches a free node. Vectors span the whole bounding box; entries of
/// non-free nodes are treated as prescribed data.
#[derive(Clone, Debug)]
pub struct Stencil {
    dim: usize,
    h: f64,
    strides: [usize; 3],
    len: usize,
    active: Vec<usize>,
    free: Vec<bool>,
}

impl Stencil {
    pub fn new(dim: usize, h: f64, shape: [usize; 3], free: Vec<bool>) -> Self {
        let strides = [1, shape[0], shape[0] * shape[1]];
        let len = free.len();
        let active = (0..len)
            .filter(|&c| {
                let co = [c % shape[0], (c / shape[0]) % shape[1], c / (shape[0] * shape[1])];
                if (0..dim).any(|k| co[k] + 1 >= shape[k]) {
                    return false;
                }
                free[c] || (0..dim).any(|k| free[c + strides[k]])
            })
            .collect();
        Self { dim, h, strides, len, active, free }
    }

    pub fn for_domain(domain: &GridDomain) -> Self {
        Self::new(domain.dim(), domain.h(), domain.shape(), domain.mask().to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn free(&self) -> &[bool] {
        &self.free
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Cell volume `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    #[inline]
    pub fn grad_at(&self, u: &[f64], c: usize) -> [f64; 3] {
        let mut g = [0.0; 3];
        let uc = u[c];
        for (k, gk) in g.iter_mut().enumerate().take(self.dim) {
            *gk = (u[c + self.strides[k]] - uc) / self.h;
        }
        g
    }

    /// Largest `|D u|` over the active cells.
    pub fn max_gradient(&self, u: &[f64]) -> f64 {
        self.active
            .iter()
            .map(|&c| {
                let g = self.grad_at(u, c);
                g[0] * g[0] + g[1] * g[1] + g[2] * g[2]
            })
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// `h^N sum_c |D u(c)|^p` over the active cells.
    pub fn energy(&self, u: &[f64], p: f64) -> f64 {
        self.cell_volume() * self.energy_density_sum(u, p, |_| true)
    }

    /// Sum of `|D u(c)|^p` over active cells accepted by `keep`.
    pub fn energy_density_sum(&self, u: &[f64], p: f64, keep: impl Fn(usize) -> bool) -> f64 {
        self.active
            .iter()
            .filter(|&&c| keep(c))
            .map(|&c| {
                let g = self.grad_at(u, c);
                pow_half(g[0] * g[0] + g[1] * g[1] + g[2] * g[2], p)
            })
            .sum()
    }

    /// Writes `D^T (w(c) D u(c))` into `out` (overwritten, full box), where
    /// `w = (|Du|^2 + eps^2)^((p-2)/2)`; this is `1/p` times the `L^2`
    /// gradient of the regularized energy.
    pub fn flux_divergence(&self, u: &[f64], p: f64, eps: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let e2 = eps * eps;
        let inv_h = 1.0 / self.h;
        for &c in &self.active {
            let g = self.grad_at(u, c);
            let s = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            let w = flux_weight(s + e2, p);
            for (k, gk) in g.iter().enumerate().take(self.dim) {
                let f = w * gk * inv_h;
                out[c] -= f;
                out[c + self.strides[k]] += f;
            }
        }
    }

    /// `sum_c w(c) D u(c) . D v(c)` over active cells with the unregularized
    /// weight `|Du|^(p-2)`.
    pub fn flux_pairing(&self, u: &[f64], v: &[f64], p: f64) -> f64 {
        self.active
            .iter()
            .map(|&c| {
                let g = self.grad_at(u, c);
                let q = self.grad_at(v, c);
                let s = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
                let w = flux_weight(s, p);
                w * (g[0] * q[0] + g[1] * q[1] + g[2] * q[2])
            })
            .sum()
    }

    /// Linearization of `flux_divergence` around `u`, with the weights
    /// regularized by `delta` (used for the Newton-type preconditioners).
    pub fn linearize(&self, u: &[f64], p: f64, delta: f64) -> Linearized<'_> {
        self.build_linear(u, p, delta, true)
    }

    /// Lagged-diffusivity operator `v -> D^T (w D v)` with the weights frozen
    /// at `u`. For `p < 2` it dominates the linearization, which keeps
    /// preconditioned steps from overshooting where `|Du|` is small.
    pub fn lagged(&self, u: &[f64], p: f64, delta: f64) -> Linearized<'_> {
        self.build_linear(u, p, delta, false)
    }

    fn build_linear(&self, u: &[f64], p: f64, delta: f64, tangent: bool) -> Linearized<'_> {
        let d2 = delta * delta;
        let mut coef = Vec::with_capacity(self.active.len());
        for &c in &self.active {
            let g = self.grad_at(u, c);
            let s = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            let sr = s + d2;
            let w = flux_weight(sr, p);
            let a = if tangent && sr > 0.0 { (p - 2.0) * w / sr } else { 0.0 };
            coef.push(CellCoef { w, a, g });
        }
        Linearized { stencil: self, coef }
    }
}

#[inline]
fn flux_weight(s_reg: f64, p: f64) -> f64 {
    if p == 2.0 {
        1.0
    } else if s_reg == 0.0 {
        // |g|^(p-2) g -> 0 as g -> 0 for every p > 1
        0.0
    } else {
        s_reg.powf(0.5 * (p - 2.0))
    }
}

#[derive(Clone, Copy, Debug)]
struct CellCoef {
    w: f64,
    a: f64,
    g: [f64; 3],
}

/// Symmetric positive semi-definite operator
/// `v -> D^T [w (I + (p-2) g g^T / (|g|^2 + delta^2)) D v]`.
pub struct Linearized<'a> {
    stencil: &'a Stencil,
    coef: Vec<CellCoef>,
}

impl Linearized<'_> {
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let st = self.stencil;
        out.iter_mut().for_each(|o| *o = 0.0);
        let inv_h = 1.0 / st.h;
        for (cc, &c) in self.coef.iter().zip(&st.active) {
            let q = st.grad_at(v, c);
            let gq = cc.g[0] * q[0] + cc.g[1] * q[1] + cc.g[2] * q[2];
            for k in 0..st.dim {
                let f = (cc.w * q[k] + cc.a * gq * cc.g[k]) * inv_h;
                out[c] -= f;
                out[c + st.strides[k]] += f;
            }
        }
    }

    /// Diagonal of the operator on the full box.
    pub fn diagonal(&self) -> Vec<f64> {
        let st = self.stencil;
        let mut d = vec![0.0; st.len];
        let inv_h2 = 1.0 / (st.h * st.h);
        for (cc, &c) in self.coef.iter().zip(&st.active) {
            let gsum: f64 = cc.g[..st.dim].iter().sum();
            d[c] += (st.dim as f64 * cc.w + cc.a * gsum * gsum) * inv_h2;
            for k in 0..st.dim {
                d[c + st.strides[k]] += (cc.w + cc.a * cc.g[k] * cc.g[k]) * inv_h2;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_domain, DomainSpec};

    fn square() -> Arc<GridDomain> {
        Arc::new(generate_domain(&DomainSpec::rectangle(1.0, 1.0), 1.0 / 8.0).unwrap())
    }

    #[test]
    fn field_rejects_values_outside() {
        let d = square();
        let mut v = vec![0.0; d.len()];
        v[0] = 1.0;
        assert!(ScalarField::new(d.clone(), v.clone()).is_err());
        assert!(ScalarField::masked(d.clone(), v).unwrap().is_zero());
        let mut w = vec![0.0; d.len()];
        let inside = d.inside_cells().next().unwrap();
        w[inside] = f64::NAN;
        assert!(ScalarField::new(d, w).is_err());
    }

    #[test]
    fn linearized_diagonal_matches_unit_vectors() {
        let d = square();
        let st = Stencil::for_domain(&d);
        let u = ScalarField::from_fn(d.clone(), |x| x[0] * (1.0 - x[0]) * x[1] * x[1] * (1.0 - x[1]));
        for p in [1.5, 2.0, 3.5] {
            let lin = st.linearize(u.values(), p, 1e-3);
            let diag = lin.diagonal();
            let mut e = vec![0.0; d.len()];
            let mut out = vec![0.0; d.len()];
            for i in d.inside_cells() {
                e[i] = 1.0;
                lin.apply(&e, &mut out);
                assert!((out[i] - diag[i]).abs() <= 1e-10 * diag[i].abs().max(1.0));
                e[i] = 0.0;
            }
        }
    }

    #[test]
    fn linearized_is_derivative_of_flux() {
        let d = square();
        let st = Stencil::for_domain(&d);
        let u = ScalarField::from_fn(d.clone(), |x| (x[0] * 3.0).sin() + x[1] * x[1] + 0.3);
        let v = ScalarField::from_fn(d.clone(), |x| (x[1] * 5.0).cos() * x[0]);
        for p in [1.5, 3.0, 4.0] {
            let lin = st.linearize(u.values(), p, 0.0);
            let mut jv = vec![0.0; d.len()];
            lin.apply(v.values(), &mut jv);
            let t = 1e-6;
            let plus: Vec<f64> = u.values().iter().zip(v.values()).map(|(a, b)| a + t * b).collect();
            let minus: Vec<f64> = u.values().iter().zip(v.values()).map(|(a, b)| a - t * b).collect();
            let mut fp = vec![0.0; d.len()];
            let mut fm = vec![0.0; d.len()];
            st.flux_divergence(&plus, p, 0.0, &mut fp);
            st.flux_divergence(&minus, p, 0.0, &mut fm);
            for i in d.inside_cells() {
                let fd = (fp[i] - fm[i]) / (2.0 * t);
                // the Hessian of |g|^p / p is (p-1)-scaled along g: D^T[w(I + (p-2)nn^T)]D
                assert!((fd - jv[i]).abs() <= 1e-5 * (1.0 + jv[i].abs()), "p={p}: {fd} vs {}", jv[i]);
            }
        }
    }
}
