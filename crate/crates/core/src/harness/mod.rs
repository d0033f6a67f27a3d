//! Bound checks, empirical constants and refinement experiments over domain
//! sweeps.
//!
//! Every check reports a margin relative to its reference value and passes
//! when the margin is at least `-MARGIN_TOLERANCE`, which absorbs the
//! discretization error at the reference resolutions.

mod family;
mod hayman;
mod poincare;

pub use family::{
    adversarial_family, named_family, thin_rectangle_family, DomainCase, FAMILY_VERSION, SPIKE_INNER_RADIUS,
    SPIKE_WIDTH_2D, SPIKE_WIDTH_3D,
};
pub use hayman::{hayman_experiment, Feature, HaymanLevel, HaymanReport};
pub use poincare::{
    boundary_ball_poincare, covering_chain_check, poincare_capacity_check, ChainReport, PoincareCapacityReport,
};

use crate::eigen::{solve_principal, EigenResult, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::{boundary_components, generate_domain, inradius, DomainSpec, GridDomain};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Relative discretization allowance of every sign check.
pub const MARGIN_TOLERANCE: f64 = 0.02;

/// Outcome of one inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// Larger side minus smaller side of the inequality.
    pub margin: f64,
    /// `margin` over the reference side.
    pub relative: f64,
    pub pass: bool,
}

impl Check {
    fn new(margin: f64, reference: f64) -> Self {
        let relative = margin / reference;
        Self { margin, relative, pass: relative >= -MARGIN_TOLERANCE }
    }
}

/// Converged eigenpair of a rasterized domain with its geometry.
#[derive(Clone, Debug)]
pub struct Solved {
    pub label: String,
    pub domain: Arc<GridDomain>,
    pub result: EigenResult,
    pub inradius: f64,
    pub components: usize,
}

impl Solved {
    /// `lambda * rho^p`.
    pub fn product(&self) -> f64 {
        self.result.lambda * self.inradius.powf(self.result.p)
    }
}

/// Rasterizes `spec` at `h` and solves for the principal eigenpair.
pub fn solve_case(label: &str, spec: &DomainSpec, h: f64, p: f64, config: &SolverConfig) -> Result<Solved> {
    let domain = Arc::new(generate_domain(spec, h)?.with_label(label));
    let result = solve_principal(&domain, p, config)?;
    Ok(Solved {
        label: label.to_string(),
        inradius: inradius(&domain),
        components: boundary_components(&domain),
        domain,
        result,
    })
}

fn require_converged(r: &EigenResult, what: &str) -> Result<()> {
    if r.converged {
        Ok(())
    } else {
        Err(Error::NotConverged(format!("{what} (p = {})", r.p)))
    }
}

/// `lambda(B_1) rho^-p - lambda(Omega)`, with `rho` the discrete inradius and
/// `ball` the unit ball solved at the same spacing and exponent.
pub fn verify_upper_bound(domain: &GridDomain, result: &EigenResult, ball: &EigenResult) -> Result<Check> {
    require_converged(result, domain.label())?;
    require_converged(ball, "unit ball")?;
    let bound = ball.lambda * inradius(domain).powf(-result.p);
    Ok(Check::new(bound - result.lambda, bound))
}

/// `lambda(Omega) - lambda(Omega*)`, where `Omega*` is the ball of the same
/// discrete volume and its eigenvalue follows from `ball` by scaling. The
/// unit ball's own discrete volume is the reference, so a ball is its own
/// equality case.
pub fn verify_faber_krahn(domain: &GridDomain, result: &EigenResult, ball: &EigenResult) -> Result<Check> {
    require_converged(result, domain.label())?;
    require_converged(ball, "unit ball")?;
    let unit = ball.eigenfunction.domain().volume();
    let radius = (domain.volume() / unit).powf(1.0 / domain.dim() as f64);
    let reference = ball.lambda * radius.powf(-result.p);
    Ok(Check::new(result.lambda - reference, reference))
}

/// Lower bound for the principal frequency of the Laplacian on simply
/// connected planar domains, as a multiple of `rho^-2`.
pub const PLANAR_CONSTANT: f64 = PI * PI / 4.0;

/// `lambda rho^2 - pi^2/4` for a simply connected planar domain at `p = 2`.
pub fn verify_planar_simply_connected(domain: &GridDomain, result: &EigenResult) -> Result<Check> {
    if domain.dim() != 2 || result.p != 2.0 {
        return Err(Error::HypothesisViolated("planar check needs N = 2 and p = 2".into()));
    }
    let comps = boundary_components(domain);
    if comps != 1 {
        return Err(Error::HypothesisViolated(format!("{} has {comps} boundary components", domain.label())));
    }
    require_converged(result, domain.label())?;
    let rho = inradius(domain);
    Ok(Check::new(result.lambda * rho * rho - PLANAR_CONSTANT, PLANAR_CONSTANT))
}

/// Per-domain record of a sweep. Checks that do not apply are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub label: String,
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: f64,
    pub h: f64,
    pub inradius: f64,
    pub lambda: f64,
    /// `lambda * rho^p`.
    pub product: f64,
    pub converged: bool,
    pub boundary_components: usize,
    pub upper_margin: Option<f64>,
    pub upper_pass: Option<bool>,
    pub faber_krahn_margin: Option<f64>,
    pub faber_krahn_pass: Option<bool>,
    pub planar_margin: Option<f64>,
    pub planar_pass: Option<bool>,
    /// `lambda rho^p` when `p > N`.
    pub thm11_product: Option<f64>,
    /// `lambda rho^p` when `p > N - 1` and the boundary is connected.
    pub thm12_product: Option<f64>,
    pub notes: String,
}

impl BoundReport {
    /// Some check with a guaranteed sign failed.
    pub fn sign_failure(&self) -> bool {
        [self.upper_pass, self.faber_krahn_pass, self.planar_pass].contains(&Some(false))
    }

    fn failed(case: &DomainCase, h: f64, p: f64, err: &Error) -> Self {
        Self {
            label: case.label.clone(),
            dim: case.spec.dim(),
            p,
            h,
            inradius: f64::NAN,
            lambda: f64::NAN,
            product: f64::NAN,
            converged: false,
            boundary_components: 0,
            upper_margin: None,
            upper_pass: None,
            faber_krahn_margin: None,
            faber_krahn_pass: None,
            planar_margin: None,
            planar_pass: None,
            thm11_product: None,
            thm12_product: None,
            notes: err.to_string(),
        }
    }
}

/// Assembles the report of `solved` against the unit ball at the same
/// spacing and exponent.
pub fn bound_report(solved: &Solved, ball: &EigenResult) -> BoundReport {
    let r = &solved.result;
    let d = &solved.domain;
    let dim = d.dim();
    let mut notes = Vec::new();
    let mut keep = |c: Result<Check>| match c {
        Ok(c) => (Some(c.relative), Some(c.pass)),
        Err(e) => {
            notes.push(e.to_string());
            (None, None)
        }
    };
    let (upper_margin, upper_pass) = keep(verify_upper_bound(d, r, ball));
    let (faber_krahn_margin, faber_krahn_pass) = keep(verify_faber_krahn(d, r, ball));
    let (planar_margin, planar_pass) = if dim == 2 && r.p == 2.0 && solved.components == 1 {
        keep(verify_planar_simply_connected(d, r))
    } else {
        (None, None)
    };
    let product = solved.product();
    let ok = r.converged;
    BoundReport {
        label: solved.label.clone(),
        dim,
        p: r.p,
        h: d.h(),
        inradius: solved.inradius,
        lambda: r.lambda,
        product,
        converged: ok,
        boundary_components: solved.components,
        upper_margin,
        upper_pass,
        faber_krahn_margin,
        faber_krahn_pass,
        planar_margin,
        planar_pass,
        thm11_product: (ok && r.p > dim as f64).then_some(product),
        thm12_product: (ok && r.p > dim as f64 - 1.0 && solved.components == 1).then_some(product),
        notes: notes.join("; "),
    }
}

/// Solves every `(case, p)` pair at spacing `h` on the current rayon pool
/// and reports each against the unit ball of the same dimension. A case that
/// fails to rasterize or solve yields a report carrying the error in `notes`.
pub fn run_sweep(cases: &[DomainCase], ps: &[f64], h: f64, config: &SolverConfig) -> Result<Vec<BoundReport>> {
    let dims: Vec<usize> = cases.iter().map(|c| c.spec.dim()).collect();
    let mut keys: Vec<(usize, u64)> = dims.iter().flat_map(|&d| ps.iter().map(move |p| (d, p.to_bits()))).collect();
    keys.sort_unstable();
    keys.dedup();
    let balls = keys
        .par_iter()
        .map(|&(dim, pb)| {
            let p = f64::from_bits(pb);
            solve_case("unit-ball", &DomainSpec::ball(dim, 1.0), h, p, config).map(|s| ((dim, pb), s.result))
        })
        .collect::<Result<Vec<_>>>()?;
    let ball = |dim: usize, p: f64| &balls.iter().find(|(k, _)| *k == (dim, p.to_bits())).expect("solved").1;
    let tasks: Vec<(&DomainCase, f64)> = cases.iter().flat_map(|c| ps.iter().map(move |&p| (c, p))).collect();
    Ok(tasks
        .par_iter()
        .map(|&(case, p)| match solve_case(&case.label, &case.spec, h, p, config) {
            Ok(s) => bound_report(&s, ball(case.spec.dim(), p)),
            Err(e) => BoundReport::failed(case, h, p, &e),
        })
        .collect())
}

/// Which lower-bound statement a constant estimate refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// `p > N`, any bounded domain.
    LargeExponent,
    /// `p > N - 1` and connected boundary.
    ConnectedBoundary,
}

/// Empirical minimum of `lambda rho^p` over a family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub theorem: Theorem,
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: f64,
    pub min_product: f64,
    pub argmin: String,
    /// `(label, lambda rho^p)` of every included member.
    pub table: Vec<(String, f64)>,
    /// `(label, reason)` of every excluded member.
    pub excluded: Vec<(String, String)>,
}

/// Minimum of `lambda rho^p` over the reports of one `(N, p)` sweep, an
/// upper estimate of the best constant of the chosen statement. Members
/// outside its hypotheses are excluded with a note.
pub fn estimate_constant(reports: &[BoundReport], theorem: Theorem) -> Result<ConstantEstimate> {
    let first = reports.first().ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
    let (dim, p) = (first.dim, first.p);
    if reports.iter().any(|r| r.dim != dim || r.p != p) {
        return Err(Error::InvalidArgument("reports mix dimensions or exponents".into()));
    }
    let n = dim as f64;
    match theorem {
        Theorem::LargeExponent if p <= n => {
            return Err(Error::HypothesisViolated(format!("p = {p} <= N = {dim}")));
        }
        Theorem::ConnectedBoundary if p <= n - 1.0 => {
            return Err(Error::HypothesisViolated(format!("p = {p} <= N - 1 = {}", dim - 1)));
        }
        _ => {}
    }
    let mut table = Vec::new();
    let mut excluded = Vec::new();
    for r in reports {
        if theorem == Theorem::ConnectedBoundary && r.boundary_components != 1 {
            excluded.push((r.label.clone(), format!("{} boundary components", r.boundary_components)));
            continue;
        }
        if !r.converged {
            return Err(Error::NotConverged(format!("{}: {}", r.label, r.notes)));
        }
        table.push((r.label.clone(), r.product));
    }
    let (argmin, min_product) = table
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .ok_or_else(|| Error::InvalidArgument("no family member satisfies the hypotheses".into()))?;
    Ok(ConstantEstimate { theorem, dim, p, min_product, argmin, table, excluded })
}
