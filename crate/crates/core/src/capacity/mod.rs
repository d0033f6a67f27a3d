//! Variational p-capacity of condensers `(K, B)` on a lattice centered in `B`.
//!
//! The discrete capacity is the least p-energy `h^N sum |D phi|^p` over
//! fields equal to 1 on the cells of `K` and 0 on every cell whose center is
//! not strictly inside `B`. Truncation to `[0, 1]` never raises the energy, so
//! the minimizer is sought among fields clamped to that range.

mod lemma;

pub use lemma::{
    butr_ratio_check, point_capacity_probe, reference_constant, segment_capacity_probe, AnchorCheck,
    ButrReport, ProbeReport,
};

use crate::eigen::{Init, SolverConfig};
use crate::error::{Error, Result};
use crate::field::{ScalarField, Stencil};
use crate::geometry::{dist2, Ball, GridDomain, Point};
use crate::linalg::{dot, pcg};
use crate::variational::check_exponent;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

const ARMIJO: f64 = 1e-4;
const ROUNDOFF: f64 = 1e-14;
const CG_TOL: f64 = 1e-4;
const CG_MAX_ITER: usize = 4000;

/// Compact set `K`, as a cell mask, inside an open outer ball.
#[derive(Clone, Debug)]
pub struct CondenserProblem {
    /// Cells strictly inside the outer ball; `K` is a subset.
    region: Arc<GridDomain>,
    inner: Vec<bool>,
    outer: Ball,
    p: f64,
    label: String,
}

impl CondenserProblem {
    /// Checks `K` against `region`: every `K` cell and all its face
    /// neighbours lie in the region, so `K` stays clear of the outer ball's
    /// boundary layer. An all-false `inner` is the explicitly empty condenser.
    pub fn new(
        region: Arc<GridDomain>,
        inner: Vec<bool>,
        outer: Ball,
        p: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_exponent(p)?;
        if inner.len() != region.len() {
            return Err(Error::InvalidArgument("inner mask does not match the region".into()));
        }
        for i in (0..inner.len()).filter(|&i| inner[i]) {
            if !region.is_inside(i) {
                return Err(Error::InvalidArgument("inner set leaves the outer ball".into()));
            }
            let mut touches = false;
            region.for_each_neighbor(i, |j| touches |= !region.is_inside(j));
            if touches {
                return Err(Error::InvalidArgument("inner set touches the outer boundary".into()));
            }
        }
        Ok(Self { region, inner, outer, p, label: label.into() })
    }

    /// `K` = cells of the ball lattice whose centers satisfy `pred`; fails
    /// with [`Error::UnderResolved`] if no cell does.
    pub fn from_predicate(
        dim: usize,
        outer: Ball,
        h: f64,
        p: f64,
        label: impl Into<String>,
        pred: impl Fn(&Point) -> bool,
    ) -> Result<Self> {
        let region = Arc::new(ball_lattice(dim, &outer, h)?);
        let inner: Vec<bool> =
            (0..region.len()).map(|i| region.is_inside(i) && pred(&region.center(i))).collect();
        let label = label.into();
        if !inner.iter().any(|&k| k) {
            return Err(Error::UnderResolved(format!("inner set `{label}` covers no cell at h = {h}")));
        }
        Self::new(region, inner, outer, p, label)
    }

    /// Condenser with `K = {}` in `B`.
    pub fn empty(dim: usize, outer: Ball, h: f64, p: f64) -> Result<Self> {
        let region = Arc::new(ball_lattice(dim, &outer, h)?);
        let inner = vec![false; region.len()];
        Self::new(region, inner, outer, p, "empty")
    }

    /// `(closed ball a, open ball b)`, both centered at the origin.
    pub fn concentric(dim: usize, a: f64, b: f64, p: f64, h: f64) -> Result<Self> {
        if !(a > 0.0 && a < b) {
            return Err(Error::InvalidArgument(format!("need 0 < a < b, got a = {a}, b = {b}")));
        }
        let tol = 1e-9 * h;
        let outer = Ball::new([0.0; 3], b)?;
        Self::from_predicate(dim, outer, h, p, format!("ball({a})"), |x| dist2(x, &[0.0; 3]) <= (a + tol).powi(2))
    }

    /// Straight segment rasterized to the cells within `h/2` of it.
    pub fn segment(dim: usize, from: Point, to: Point, outer: Ball, p: f64, h: f64) -> Result<Self> {
        let reach = (0.5 + 1e-9) * h;
        let label = format!("segment({from:?},{to:?})");
        Self::from_predicate(dim, outer, h, p, label, |x| segment_dist2(x, &from, &to) <= reach * reach)
    }

    /// The single lattice cell nearest to `x`.
    pub fn point(dim: usize, x: Point, outer: Ball, p: f64, h: f64) -> Result<Self> {
        let region = Arc::new(ball_lattice(dim, &outer, h)?);
        let cell = region
            .nearest_cell(&x)
            .filter(|&c| region.is_inside(c))
            .ok_or_else(|| Error::InvalidArgument(format!("point {x:?} is outside the outer ball")))?;
        let mut inner = vec![false; region.len()];
        inner[cell] = true;
        Self::new(region, inner, outer, p, format!("point({x:?})"))
    }

    /// `F` = complement of `domain` within the closed ball of radius `r`
    /// about `center`, in the outer ball of radius `2r`. `center` must be a
    /// lattice point of `domain`, so both lattices coincide.
    pub fn domain_complement(domain: &GridDomain, center: Point, r: f64, p: f64) -> Result<Self> {
        let h = domain.h();
        let anchor = domain
            .nearest_cell(&center)
            .filter(|&c| dist2(&domain.center(c), &center) < (1e-6 * h).powi(2))
            .ok_or_else(|| Error::InvalidArgument(format!("{center:?} is not a lattice point")))?;
        let dim = domain.dim();
        let outer = Ball::new(center, 2.0 * r)?;
        let region = Arc::new(ball_lattice(dim, &outer, h)?);
        let a = domain.coords(anchor);
        let m = region.coords(region.nearest_cell(&center).expect("lattice is centered"));
        let shape = domain.shape();
        let tol = 1e-9 * h;
        let inner: Vec<bool> = (0..region.len())
            .map(|i| {
                if !region.is_inside(i) || dist2(&region.center(i), &center) > (r + tol).powi(2) {
                    return false;
                }
                let c = region.coords(i);
                let mut idx = [0usize; 3];
                for k in 0..dim {
                    let v = a[k] as i64 + c[k] as i64 - m[k] as i64;
                    if v < 0 || v >= shape[k] as i64 {
                        return true;
                    }
                    idx[k] = v as usize;
                }
                !domain.is_inside(domain.index(idx))
            })
            .collect();
        let label = format!("complement({},{center:?},{r})", domain.label());
        Self::new(region, inner, outer, p, label)
    }

    /// Same condenser with another exponent.
    pub fn with_exponent(&self, p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self { p, ..self.clone() })
    }

    pub fn region(&self) -> &Arc<GridDomain> {
        &self.region
    }

    pub fn inner(&self) -> &[bool] {
        &self.inner
    }

    pub fn inner_count(&self) -> usize {
        self.inner.iter().filter(|&&k| k).count()
    }

    pub fn outer(&self) -> &Ball {
        &self.outer
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn h(&self) -> f64 {
        self.region.h()
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Lattice of spacing `h` with a node at the center of `outer`; the mask is
/// the cells strictly inside it.
fn ball_lattice(dim: usize, outer: &Ball, h: f64) -> Result<GridDomain> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension must be 1, 2 or 3, got {dim}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {h}")));
    }
    let m = (outer.radius / h).ceil() as usize + 1;
    let mut shape = [1usize; 3];
    let mut origin = [0.0; 3];
    for k in 0..dim {
        shape[k] = 2 * m + 1;
        origin[k] = outer.center[k] - m as f64 * h;
    }
    let r = outer.radius - 1e-9 * h;
    let len: usize = shape.iter().product();
    let mask = (0..len)
        .map(|i| {
            let c = [i % shape[0], (i / shape[0]) % shape[1], i / (shape[0] * shape[1])];
            let d2: f64 = (0..dim).map(|k| ((c[k] as f64 - m as f64) * h).powi(2)).sum();
            d2 < r * r
        })
        .collect();
    GridDomain::new(dim, h, origin, shape, mask, format!("ball{dim}d({})", outer.radius))
}

fn segment_dist2(x: &Point, a: &Point, b: &Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((0..3).map(|k| (x[k] - a[k]) * ab[k]).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]];
    dist2(x, &q)
}

/// Minimal energy and its potential.
#[derive(Clone, Debug)]
pub struct CapacityResult {
    /// Discrete capacity, `>= 0`.
    pub value: f64,
    /// 1 on `K`, 0 outside the outer ball, within `[0, 1]` everywhere.
    pub potential: ScalarField,
    pub converged: bool,
    pub iterations: usize,
    /// Final Newton decrement relative to the energy.
    pub relative_decrement: f64,
}

/// Flat record of one capacity computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityRecord {
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: f64,
    pub h: f64,
    #[serde(rename = "K_descriptor")]
    pub k_descriptor: String,
    pub outer_radius: f64,
    pub capacity: f64,
    pub converged: bool,
}

impl CapacityRecord {
    pub fn new(problem: &CondenserProblem, result: &CapacityResult) -> Self {
        Self {
            dim: problem.dim(),
            p: problem.p(),
            h: problem.h(),
            k_descriptor: problem.label().to_string(),
            outer_radius: problem.outer().radius,
            capacity: result.value,
            converged: result.converged,
        }
    }
}

/// Minimizes the discrete p-energy of the condenser by damped Newton steps.
///
/// The start is the discrete harmonic potential (or a seeded random field
/// when `config.init` is [`Init::Random`]). Directions solve `H d = F` with
/// `F` the flux divergence and `H` its tangent for `p >= 2` or the lagged
/// diffusivity for `p < 2`; trial fields are clamped to `[0, 1]` and accepted
/// by an Armijo test on the energy. Converges once `p h^N <F, d>` is at most
/// `config.grad_tol` times the energy.
pub fn capacity(problem: &CondenserProblem, config: &SolverConfig) -> Result<CapacityResult> {
    config.validate()?;
    let p = problem.p;
    let region = &problem.region;
    let n = region.len();
    let mut u: Vec<f64> = problem.inner.iter().map(|&k| if k { 1.0 } else { 0.0 }).collect();
    if problem.inner_count() == 0 {
        let potential = ScalarField::new(region.clone(), u)?;
        return Ok(CapacityResult { value: 0.0, potential, converged: true, iterations: 0, relative_decrement: 0.0 });
    }
    let free: Vec<bool> = (0..n).map(|i| region.is_inside(i) && !problem.inner[i]).collect();
    let st = Stencil::new(region.dim(), region.h(), region.shape(), free);
    let hn = st.cell_volume();

    match config.init {
        Init::Distance => harmonic_start(&st, &mut u),
        Init::Random => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
            for (v, &f) in u.iter_mut().zip(st.free()) {
                if f {
                    *v = rng.gen_range(0.0..1.0);
                }
            }
        }
    }

    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut trial = u.clone();
    let mut energy = st.energy(&u, p);
    let mut rel = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    let delta_rel = if p > 2.0 { 1e-2 } else { 1e-3 };
    while iterations <= config.max_iter {
        let scale = st.max_gradient(&u);
        st.flux_divergence(&u, p, config.eps * scale, &mut f);
        let delta = if p == 2.0 { 0.0 } else { delta_rel * scale };
        let lin = if p < 2.0 { st.lagged(&u, p, delta) } else { st.linearize(&u, p, delta) };
        let diag = lin.diagonal();
        d.iter_mut().for_each(|x| *x = 0.0);
        pcg(|v, o| lin.apply(v, o), &diag, st.free(), &f, &mut d, CG_TOL, CG_MAX_ITER);
        let slope = p * hn * dot(&f, &d);
        rel = slope.max(0.0) / energy;
        if rel <= config.grad_tol || iterations == config.max_iter {
            converged = rel <= config.grad_tol;
            break;
        }
        let mut t = config.initial_step;
        let accepted = loop {
            for i in 0..n {
                if st.free()[i] {
                    trial[i] = (u[i] - t * d[i]).clamp(0.0, 1.0);
                }
            }
            let e = st.energy(&trial, p);
            if e <= energy - ARMIJO * t * slope + ROUNDOFF * energy {
                break Some(e);
            }
            t *= config.backtrack;
            if t < 1e-10 * config.initial_step {
                break None;
            }
        };
        match accepted {
            Some(e) => {
                energy = e;
                u.copy_from_slice(&trial);
                iterations += 1;
            }
            None => {
                // no representable decrease left
                converged = rel <= config.grad_tol.sqrt();
                break;
            }
        }
    }
    let potential = ScalarField::new(region.clone(), u)?;
    Ok(CapacityResult { value: energy, potential, converged, iterations, relative_decrement: rel })
}

/// Replaces the free entries of `u` by the discrete harmonic extension of
/// its prescribed entries, clamped to `[0, 1]`.
fn harmonic_start(st: &Stencil, u: &mut [f64]) {
    let n = u.len();
    let zeros = vec![0.0; n];
    let lap = st.linearize(&zeros, 2.0, 0.0);
    let mut b = vec![0.0; n];
    lap.apply(u, &mut b);
    b.iter_mut().for_each(|v| *v = -*v);
    let mut x = vec![0.0; n];
    pcg(|v, o| lap.apply(v, o), &lap.diagonal(), st.free(), &b, &mut x, 1e-10, CG_MAX_ITER * 4);
    for i in 0..n {
        if st.free()[i] {
            u[i] = x[i].clamp(0.0, 1.0);
        }
    }
}

/// Area of the unit sphere in `R^N`.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

/// Capacity of `(closed ball a, open ball b)` in `R^N`.
///
/// The radial minimizer has constant flux `r^(N-1) |phi'|^(p-1)`, which gives
/// `sigma_N (int_a^b r^(-(N-1)/(p-1)) dr)^(1-p)`; the integral is a power
/// difference, or `ln(b/a)` when `p = N`.
pub fn radial_capacity(a: f64, b: f64, p: f64, dim: usize) -> Result<f64> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent must exceed 1, got {p}")));
    }
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension must be 1, 2 or 3, got {dim}")));
    }
    let e = 1.0 - (dim as f64 - 1.0) / (p - 1.0);
    let integral = if e.abs() < 1e-12 { (b / a).ln() } else { (b.powf(e) - a.powf(e)) / e };
    Ok(sphere_area(dim) * integral.powf(1.0 - p))
}
