//! The p-Dirichlet energy, the Rayleigh quotient, its gradient and the weak
//! residual of the eigenvalue equation, all on forward differences with the
//! field extended by zero outside the domain.

use crate::error::{Error, Result};
use crate::field::{ScalarField, Stencil};
use serde::{Deserialize, Serialize};

/// Smallest and largest supported exponent.
pub const P_MIN: f64 = 1.1;
pub const P_MAX: f64 = 16.0;

pub fn check_exponent(p: f64) -> Result<()> {
    if (P_MIN..=P_MAX).contains(&p) {
        Ok(())
    } else {
        Err(Error::ExponentOutOfRange(p))
    }
}

/// Energy, mass and their ratio for one field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayleighEval {
    /// `h^N sum |Du|^p`
    pub energy: f64,
    /// `h^N sum |u|^p`
    pub mass: f64,
    pub quotient: f64,
}

/// Forward-difference gradient at every lattice cell (zero where the stencil
/// leaves the box).
pub fn gradient_field(u: &ScalarField) -> Vec<[f64; 3]> {
    let st = Stencil::for_domain(u.domain());
    let mut out = vec![[0.0; 3]; u.values().len()];
    for &c in st.active() {
        out[c] = st.grad_at(u.values(), c);
    }
    out
}

pub(crate) fn mass(st: &Stencil, u: &[f64], p: f64) -> f64 {
    let sum: f64 = if p == 2.0 {
        u.iter().map(|v| v * v).sum()
    } else {
        u.iter().filter(|v| **v != 0.0).map(|v| v.abs().powf(p)).sum()
    };
    st.cell_volume() * sum
}

pub(crate) fn eval_raw(st: &Stencil, u: &[f64], p: f64) -> Result<RayleighEval> {
    let mass = mass(st, u, p);
    if mass == 0.0 {
        return Err(Error::UndefinedQuotient);
    }
    let energy = st.energy(u, p);
    Ok(RayleighEval { energy, mass, quotient: energy / mass })
}

/// Discrete Rayleigh quotient `int |grad u|^p / int |u|^p` with midpoint
/// weights `h^N`.
pub fn rayleigh_quotient(u: &ScalarField, p: f64) -> Result<RayleighEval> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent must exceed 1, got {p}")));
    }
    eval_raw(&Stencil::for_domain(u.domain()), u.values(), p)
}

/// `L^2` gradient of the quotient (regularized by `eps`) written into `out`;
/// returns the unregularized evaluation. The `L^2` representative satisfies
/// `dR[v] = h^N sum_j G_j v_j`, so for `p = 2` it equals
/// `2 (-Lap u - R u) / mass` on domain cells.
pub(crate) fn gradient_raw(st: &Stencil, u: &[f64], p: f64, eps: f64, out: &mut [f64]) -> Result<RayleighEval> {
    let ev = eval_raw(st, u, p)?;
    st.flux_divergence(u, p, eps, out);
    let r = ev.quotient;
    let scale = p / ev.mass;
    for (j, o) in out.iter_mut().enumerate() {
        if !st.free()[j] {
            *o = 0.0;
            continue;
        }
        let v = u[j];
        let b = if p == 2.0 { v } else if v == 0.0 { 0.0 } else { v.abs().powf(p - 2.0) * v };
        *o = scale * (*o - r * b);
    }
    Ok(ev)
}

/// `L^2` gradient of the quotient with `|Du|^2` replaced by `|Du|^2 + eps^2`
/// in the energy. Zero on false cells.
pub fn rayleigh_gradient(u: &ScalarField, p: f64, eps: f64) -> Result<ScalarField> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("regularization must be nonnegative, got {eps}")));
    }
    let st = Stencil::for_domain(u.domain());
    let mut out = vec![0.0; u.values().len()];
    gradient_raw(&st, u.values(), p, eps, &mut out)?;
    ScalarField::new(u.domain().clone(), out)
}

/// Discrete weak form
/// `h^N sum |Du|^(p-2) Du . Dv - lambda h^N sum |u|^(p-2) u v`.
pub fn weak_residual(u: &ScalarField, lambda: f64, p: f64, v: &ScalarField) -> Result<f64> {
    if u.domain() != v.domain() && **u.domain() != **v.domain() {
        return Err(Error::InvalidArgument("fields live on different domains".into()));
    }
    let st = Stencil::for_domain(u.domain());
    let flux = st.flux_pairing(u.values(), v.values(), p);
    let source: f64 = u
        .values()
        .iter()
        .zip(v.values())
        .filter(|(a, _)| **a != 0.0)
        .map(|(a, b)| a.abs().powf(p - 2.0) * a * b)
        .sum();
    Ok(st.cell_volume() * (flux - lambda * source))
}
