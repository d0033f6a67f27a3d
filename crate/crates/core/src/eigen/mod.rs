//! Principal eigenpair of the discrete p-Laplacian.
//!
//! The quotient is minimized by a projected descent whose direction is the
//! Rayleigh gradient preconditioned by the linearized flux operator `H(u)`:
//! `d = H^-1 (F(u) - R B(u))`, with `F` the discrete `-div(|Du|^(p-2) Du)` and
//! `B(u) = |u|^(p-2) u`. Near an eigenfunction the map `u -> u - d` is inverse
//! iteration for the pencil `(H, (p-1) |u|^(p-2))`, whose lowest eigenvalue is
//! the quotient itself, so the unit step damps every error mode; for `p = 2`
//! it is exactly inverse iteration. A backtracking Armijo search on the
//! projected trial `|u - t d|` starting at `t = 1` guards every step.

mod oned;

pub use oned::solve_1d;

use crate::error::{Error, Result};
use crate::field::{ScalarField, Stencil};
use crate::geometry::{distance_field, GridDomain};
use crate::linalg::{dot, pcg};
use crate::variational::{check_exponent, eval_raw, gradient_raw, mass};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Starting field of the descent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    /// Distance to the complement.
    Distance,
    /// Uniform random values on domain cells drawn from the config seed.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iter: usize,
    /// Stop once the gradient norm (see [`EigenResult::gradient_norm`]) at
    /// unit mass is below `grad_tol * lambda` ...
    pub grad_tol: f64,
    /// ... and the quotient moved by at most `stagnation_tol * lambda` over
    /// the last 10 iterations ...
    pub stagnation_tol: f64,
    /// ... and the weak residual at unit mass is at most `residual_tol |v|`
    /// in `L^2` for every test field `v`, i.e. `|G|_2 / p <= residual_tol`.
    /// The relative test alone leaves this loose when `lambda` is large.
    pub residual_tol: f64,
    /// Regularization of the flux weight, relative to the largest difference
    /// quotient of the current field.
    pub eps: f64,
    /// Step reduction factor of the line search, in `(0, 1)`.
    pub backtrack: f64,
    /// First trial step of every line search.
    pub initial_step: f64,
    pub seed: u64,
    /// Warm start from the `p = 2` eigenfunction when `|p - 2| > 0.5`.
    pub continuation: bool,
    pub init: Init,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            grad_tol: 1e-7,
            stagnation_tol: 1e-10,
            residual_tol: 1e-4,
            eps: 1e-8,
            backtrack: 0.5,
            initial_step: 1.0,
            seed: 0,
            continuation: true,
            init: Init::Distance,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("solver config: {what}")));
        if self.max_iter == 0 {
            return bad("max_iter must be positive");
        }
        if !(self.grad_tol > 0.0 && self.stagnation_tol > 0.0 && self.residual_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return bad("eps must be nonnegative");
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("backtracking factor must lie in (0, 1)");
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad("initial step must be positive");
        }
        Ok(())
    }
}

/// Estimated principal eigenpair.
#[derive(Clone, Debug)]
pub struct EigenResult {
    pub p: f64,
    pub lambda: f64,
    /// Nonnegative, unit discrete p-mass.
    pub eigenfunction: ScalarField,
    pub iterations: usize,
    /// Norm of the quotient gradient `G` at the returned field, measured in
    /// the dual of the preconditioner energy: `sqrt(h^N <G, H^-1 G>)`. Unlike
    /// the `L^2` norm it does not stall on the non-Lipschitz flux of `p < 2`.
    pub gradient_norm: f64,
    pub converged: bool,
    /// Quotient after every accepted step of the final stage.
    pub history: Vec<f64>,
}

const STAGNATION_WINDOW: usize = 10;
const ARMIJO: f64 = 1e-4;
/// Accepted quotient increase from rounding, relative to the quotient.
const ROUNDOFF: f64 = 1e-14;
const CG_TOL: f64 = 1e-3;
const CG_MAX_ITER: usize = 2000;

/// Fails unless the domain spans at least three cells along every axis.
pub fn check_domain_size(domain: &GridDomain) -> Result<()> {
    let ext = domain.inside_extent();
    if let Some(k) = (0..domain.dim()).find(|&k| ext[k] < 3) {
        return Err(Error::DomainTooSmall(format!(
            "{} interior cells along axis {k}, need at least 3",
            ext[k]
        )));
    }
    Ok(())
}

/// Principal eigenpair of the discrete p-Laplacian with zero Dirichlet data.
///
/// For `p = 2` inverse power iteration is used; otherwise preconditioned
/// descent, with continuation from `p = 2` when enabled and `|p - 2| > 0.5`.
/// A run from the distance profile that fails to converge is repeated once
/// from a seeded random field; the better of the two is returned.
pub fn solve_principal(domain: &Arc<GridDomain>, p: f64, config: &SolverConfig) -> Result<EigenResult> {
    check_exponent(p)?;
    config.validate()?;
    check_domain_size(domain)?;
    if p == 2.0 {
        return solve_inverse_power(domain, config);
    }
    let st = Stencil::for_domain(domain);
    let mut iterations = 0;
    let start = if config.continuation && (p - 2.0).abs() > 0.5 {
        let loose = SolverConfig {
            grad_tol: 1e-6,
            residual_tol: f64::INFINITY,
            max_iter: config.max_iter.min(300),
            ..config.clone()
        };
        let warm = inverse_power_raw(&st, initial_field(domain, config.init, config.seed), &loose);
        iterations += warm.iterations;
        let mut u = warm.u;
        for q in continuation_path(p) {
            let stage = descend(&st, q, u, &loose);
            iterations += stage.iterations;
            u = stage.u;
        }
        u
    } else {
        initial_field(domain, config.init, config.seed)
    };
    let mut best = descend(&st, p, start, config);
    best.iterations += iterations;
    if !best.converged && config.init == Init::Distance {
        let retry = descend(&st, p, initial_field(domain, Init::Random, config.seed), config);
        let total = best.iterations + retry.iterations;
        if retry.converged || (!best.converged && retry.lambda < best.lambda) {
            best = retry;
        }
        best.iterations = total;
    }
    best.into_result(domain, p)
}

/// Preconditioned descent from the initial field selected by the config,
/// with no continuation and no fast path.
pub fn solve_descent(domain: &Arc<GridDomain>, p: f64, config: &SolverConfig) -> Result<EigenResult> {
    check_exponent(p)?;
    config.validate()?;
    check_domain_size(domain)?;
    let st = Stencil::for_domain(domain);
    descend(&st, p, initial_field(domain, config.init, config.seed), config).into_result(domain, p)
}

/// Inverse power iteration for `p = 2`, each solve by conjugate gradients.
pub fn solve_inverse_power(domain: &Arc<GridDomain>, config: &SolverConfig) -> Result<EigenResult> {
    config.validate()?;
    check_domain_size(domain)?;
    let st = Stencil::for_domain(domain);
    inverse_power_raw(&st, initial_field(domain, config.init, config.seed), config).into_result(domain, 2.0)
}

/// True iff the field, negated when its sum is negative, is at least
/// `-1e-10` everywhere on the domain.
pub fn positivity_check(result: &EigenResult) -> bool {
    let u = &result.eigenfunction;
    let sign = if u.values().iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    u.domain().inside_cells().all(|i| sign * u.values()[i] >= -1e-10)
}

/// Intermediate exponents from 2 toward `p`, each within a factor 2 of the
/// previous one; `p` itself is excluded.
fn continuation_path(p: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut q = 2.0f64;
    loop {
        q = if p > q { (2.0 * q).min(p) } else { (0.5 * q).max(p) };
        if q == p {
            return out;
        }
        out.push(q);
    }
}

fn initial_field(domain: &GridDomain, init: Init, seed: u64) -> Vec<f64> {
    match init {
        Init::Distance => distance_field(domain),
        Init::Random => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            domain.mask().iter().map(|&m| if m { rng.gen_range(0.05..1.0) } else { 0.0 }).collect()
        }
    }
}

struct Raw {
    u: Vec<f64>,
    lambda: f64,
    iterations: usize,
    gradient_norm: f64,
    converged: bool,
    history: Vec<f64>,
}

impl Raw {
    fn into_result(self, domain: &Arc<GridDomain>, p: f64) -> Result<EigenResult> {
        Ok(EigenResult {
            p,
            lambda: self.lambda,
            eigenfunction: ScalarField::new(domain.clone(), self.u)?,
            iterations: self.iterations,
            gradient_norm: self.gradient_norm,
            converged: self.converged,
            history: self.history,
        })
    }
}

fn normalize(st: &Stencil, u: &mut [f64], p: f64) {
    let m = mass(st, u, p);
    let s = m.powf(-1.0 / p);
    u.iter_mut().for_each(|v| *v *= s);
}

fn stagnant(history: &[f64], tol: f64) -> bool {
    let n = history.len();
    n > STAGNATION_WINDOW && (history[n - 1 - STAGNATION_WINDOW] - history[n - 1]).abs() <= tol * history[n - 1]
}

/// Quadratic model minimizer of `phi` from `phi(0)`, `phi'(0)` and `phi(t)`;
/// `None` when the model is not convex.
fn quadratic_step(phi0: f64, slope0: f64, t: f64, phi_t: f64) -> Option<f64> {
    let curv = (phi_t - phi0 - slope0 * t) / (t * t);
    (curv > 0.0).then(|| -slope0 / (2.0 * curv))
}

/// Preconditioned nonlinear conjugate gradients (Polak-Ribiere+) on the
/// quotient. `d = H^-1 G / p` is the preconditioned gradient; with `beta = 0`
/// a unit step along `-d` is the nonlinear inverse iteration.
fn descend(st: &Stencil, p: f64, mut u: Vec<f64>, cfg: &SolverConfig) -> Raw {
    let n = u.len();
    let hn = st.cell_volume();
    for (v, &f) in u.iter_mut().zip(st.free()) {
        *v = if f { v.abs() } else { 0.0 };
    }
    normalize(st, &mut u, p);
    let mut g = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut d_prev = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut extra = vec![0.0; n];
    let base_step = cfg.initial_step;
    let mut history = Vec::new();
    let mut gnorm = f64::INFINITY;
    let mut lambda = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;
    // <g_prev, d_prev>; zero restarts the conjugation
    let mut prev_gd = 0.0;
    // weights stay bounded away from zero for p > 2 and finite for p < 2
    let delta_rel = if p > 2.0 { 0.05 } else { 1e-3 };

    while iterations <= cfg.max_iter {
        let scale = st.max_gradient(&u);
        let ev = match gradient_raw(st, &u, p, cfg.eps * scale, &mut g) {
            Ok(ev) => ev,
            Err(_) => break,
        };
        lambda = ev.quotient;
        history.push(lambda);
        // unit mass: F - R B = (1/p) G
        for (r, gi) in rhs.iter_mut().zip(&g) {
            *r = gi / p;
        }
        let delta = if p == 2.0 { 0.0 } else { delta_rel * scale };
        let lin = if p < 2.0 { st.lagged(&u, p, delta) } else { st.linearize(&u, p, delta) };
        let diag = lin.diagonal();
        d.iter_mut().for_each(|x| *x = 0.0);
        pcg(|v, o| lin.apply(v, o), &diag, st.free(), &rhs, &mut d, CG_TOL, CG_MAX_ITER);
        let gd = dot(&g, &d);
        gnorm = (p * hn * gd).max(0.0).sqrt();
        let small = gnorm <= cfg.grad_tol * lambda && (hn * dot(&g, &g)).sqrt() / p <= cfg.residual_tol;
        if small && stagnant(&history, cfg.stagnation_tol) {
            converged = true;
            break;
        }
        if iterations == cfg.max_iter {
            break;
        }
        if !(gd > 0.0) {
            converged = small;
            break;
        }
        let beta = if prev_gd > 0.0 {
            let num: f64 = (0..n).map(|i| g[i] * (d[i] - d_prev[i])).sum();
            (num / prev_gd).max(0.0)
        } else {
            0.0
        };
        for i in 0..n {
            s[i] = beta * s[i] - d[i];
        }
        let mut slope = hn * dot(&g, &s);
        if !(slope < 0.0) {
            // lost conjugacy: restart along the preconditioned gradient
            for i in 0..n {
                s[i] = -d[i];
            }
            slope = -hn * gd;
        }

        let mut t = base_step;
        let accepted = loop {
            for i in 0..n {
                trial[i] = (u[i] + t * s[i]).abs();
            }
            let phi = eval_raw(st, &trial, p).map(|e| e.quotient).unwrap_or(f64::INFINITY);
            if phi <= lambda + ARMIJO * t * slope + ROUNDOFF * lambda {
                // the model may ask for a longer step along a conjugate direction
                if let Some(t2) = quadratic_step(lambda, slope, t, phi).filter(|&t2| t2 > 1.5 * t) {
                    let t2 = t2.min(8.0 * t);
                    for i in 0..n {
                        extra[i] = (u[i] + t2 * s[i]).abs();
                    }
                    if eval_raw(st, &extra, p).is_ok_and(|e| e.quotient < phi) {
                        std::mem::swap(&mut trial, &mut extra);
                    }
                }
                break true;
            }
            let shrink = if phi.is_finite() {
                quadratic_step(lambda, slope, t, phi).map_or(cfg.backtrack * t, |t2| t2.clamp(0.1 * t, cfg.backtrack * t))
            } else {
                cfg.backtrack * t
            };
            t = shrink;
            if t < 1e-10 * base_step {
                break false;
            }
        };
        if !accepted {
            // no representable decrease left
            converged = small;
            break;
        }
        std::mem::swap(&mut u, &mut trial);
        let c = mass(st, &u, p).powf(-1.0 / p);
        u.iter_mut().for_each(|v| *v *= c);
        s.iter_mut().for_each(|v| *v *= c);
        std::mem::swap(&mut d, &mut d_prev);
        prev_gd = gd;
        iterations += 1;
    }
    Raw { u, lambda, iterations, gradient_norm: gnorm, converged, history }
}

fn inverse_power_raw(st: &Stencil, mut u: Vec<f64>, cfg: &SolverConfig) -> Raw {
    let n = u.len();
    let hn = st.cell_volume();
    for (v, &f) in u.iter_mut().zip(st.free()) {
        *v = if f { v.abs() } else { 0.0 };
    }
    normalize(st, &mut u, 2.0);
    let zeros = vec![0.0; n];
    let lap = st.linearize(&zeros, 2.0, 0.0);
    let diag = lap.diagonal();
    let mut g = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut history = Vec::new();
    let mut gnorm = f64::INFINITY;
    let mut lambda = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;
    while iterations <= cfg.max_iter {
        let ev = match gradient_raw(st, &u, 2.0, 0.0, &mut g) {
            Ok(ev) => ev,
            Err(_) => break,
        };
        lambda = ev.quotient;
        history.push(lambda);
        // warm start at u / R leaves a relative residual of |G|_2 / (2R)
        let l2 = (hn * dot(&g, &g)).sqrt();
        for i in 0..n {
            x[i] = u[i] / lambda;
        }
        let rtol = (0.01 * l2 / (2.0 * lambda)).max(1e-14);
        pcg(|v, o| lap.apply(v, o), &diag, st.free(), &u, &mut x, rtol, CG_MAX_ITER * 4);
        // with x = A^-1 u and unit mass, A^-1 G = 2 (u - R x)
        let dual: f64 = (0..n).map(|i| g[i] * 2.0 * (u[i] - lambda * x[i])).sum();
        gnorm = (hn * dual).abs().sqrt();
        if gnorm <= cfg.grad_tol * lambda && 0.5 * l2 <= cfg.residual_tol && stagnant(&history, cfg.stagnation_tol) {
            converged = true;
            break;
        }
        if iterations == cfg.max_iter {
            break;
        }
        for (ui, xi) in u.iter_mut().zip(&x) {
            *ui = xi.abs();
        }
        normalize(st, &mut u, 2.0);
        iterations += 1;
    }
    Raw { u, lambda, iterations, gradient_norm: gnorm, converged, history }
}
