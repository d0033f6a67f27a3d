//! Curve-capacity ratio check and the point/segment refinement probes.

use super::{capacity, CapacityRecord, CondenserProblem};
use crate::eigen::SolverConfig;
use crate::error::{Error, Result};
use crate::geometry::{dist2, Ball, Point};
use crate::trend::{classify_trend, TrendReport};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Accepted relative shortfall of the ratio below the reference constant.
pub const RATIO_TOLERANCE: f64 = 0.05;

type ConstantKey = (usize, u64, usize);

fn constant_cache() -> &'static Mutex<HashMap<ConstantKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<ConstantKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `Cap(radius segment, B_2) / Cap(closed B_1, B_2)` on the lattice with
/// `cells_per_radius` cells per unit. The segment joins the center to the
/// unit sphere. Cached per `(N, p, cells_per_radius)`; the first config
/// used for a key decides its value.
pub fn reference_constant(dim: usize, p: f64, cells_per_radius: usize, config: &SolverConfig) -> Result<f64> {
    let key = (dim, p.to_bits(), cells_per_radius);
    if let Some(&c) = constant_cache().lock().expect("cache poisoned").get(&key) {
        return Ok(c);
    }
    let h = 1.0 / cells_per_radius as f64;
    let outer = Ball::new([0.0; 3], 2.0)?;
    let seg = clipped_segment(dim, [0.0; 3], [1.0, 0.0, 0.0], 1.0, outer.clone(), p, h)?;
    let ball = CondenserProblem::concentric(dim, 1.0, 2.0, p, h)?;
    let num = converged_capacity(&seg, config)?;
    let den = converged_capacity(&ball, config)?;
    let c = num / den;
    constant_cache().lock().expect("cache poisoned").insert(key, c);
    Ok(c)
}

fn converged_capacity(problem: &CondenserProblem, config: &SolverConfig) -> Result<f64> {
    let r = capacity(problem, config)?;
    if !r.converged {
        return Err(Error::NotConverged(format!("capacity of {}", problem.label())));
    }
    Ok(r.value)
}

/// Segment `[from, to]` intersected with the closed ball of radius `r` about
/// the outer center.
fn clipped_segment(dim: usize, from: Point, to: Point, r: f64, outer: Ball, p: f64, h: f64) -> Result<CondenserProblem> {
    let tol = 1e-9 * h;
    let reach = (0.5 + 1e-9) * h;
    let center = outer.center;
    let label = format!("segment({from:?},{to:?})&ball({r})");
    CondenserProblem::from_predicate(dim, outer, h, p, label, |x| {
        super::segment_dist2(x, &from, &to) <= reach * reach && dist2(x, &center) <= (r + tol).powi(2)
    })
}

/// Ratio check at one position of the ball center on the segment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnchorCheck {
    /// `midpoint`, `endpoint` or `oblique-endpoint`.
    pub anchor: String,
    pub capacity: f64,
    /// Capacity relative to the ball capacity `Cap(closed B_r, B_2r)`.
    pub ratio: f64,
    /// `ratio / C - 1`.
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ButrReport {
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: f64,
    pub r: f64,
    pub segment_length: f64,
    pub h: f64,
    pub reference_constant: f64,
    pub ball_capacity: f64,
    pub anchors: Vec<AnchorCheck>,
    /// Every margin is at least `-RATIO_TOLERANCE`.
    pub pass: bool,
}

/// Checks `Cap(K & closed B_r(x), B_2r(x)) >= C Cap(closed B_r, B_2r)` for a
/// straight segment `K` of the given length through `x`, with `x` at its
/// midpoint, at an endpoint, and at an endpoint of a segment at 30 degrees to
/// the lattice axes, on a lattice of `cells_per_radius` cells per
/// `r`. `C` is [`reference_constant`] at the same resolution, so the endpoint
/// case reproduces it up to the solver tolerance.
pub fn butr_ratio_check(
    segment_length: f64,
    r: f64,
    p: f64,
    dim: usize,
    cells_per_radius: usize,
    config: &SolverConfig,
) -> Result<ButrReport> {
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension must be 2 or 3, got {dim}")));
    }
    if p <= dim as f64 - 1.0 {
        return Err(Error::HypothesisViolated(format!("p = {p} <= N - 1 = {}", dim - 1)));
    }
    if !(r > 0.0 && r < 0.5 * segment_length) {
        return Err(Error::HypothesisViolated(format!(
            "radius {r} is not below half the segment length {segment_length}"
        )));
    }
    if cells_per_radius < 2 {
        return Err(Error::UnderResolved("need at least 2 cells per radius".into()));
    }
    let c = reference_constant(dim, p, cells_per_radius, config)?;
    let h = r / cells_per_radius as f64;
    let outer = Ball::new([0.0; 3], 2.0 * r)?;
    let ball = converged_capacity(&CondenserProblem::concentric(dim, r, 2.0 * r, p, h)?, config)?;
    let l = segment_length;
    // off-lattice direction: the rasterized set is no longer a scaled copy of
    // the reference segment
    let (s, c30) = (0.5, 0.75f64.sqrt());
    let cases = [
        ("midpoint", [-0.5 * l, 0.0, 0.0], [0.5 * l, 0.0, 0.0]),
        ("endpoint", [0.0; 3], [l, 0.0, 0.0]),
        ("oblique-endpoint", [0.0; 3], [c30 * l, s * l, 0.0]),
    ];
    let mut anchors = Vec::new();
    for (name, from, to) in cases {
        let pr = clipped_segment(dim, from, to, r, outer.clone(), p, h)?;
        let cap = converged_capacity(&pr, config)?;
        let ratio = cap / ball;
        anchors.push(AnchorCheck { anchor: name.into(), capacity: cap, ratio, margin: ratio / c - 1.0 });
    }
    let pass = anchors.iter().all(|a| a.margin >= -RATIO_TOLERANCE);
    Ok(ButrReport { dim, p, r, segment_length, h, reference_constant: c, ball_capacity: ball, anchors, pass })
}

/// Capacities over refinement levels and their trend.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeReport {
    pub records: Vec<CapacityRecord>,
    pub trend: TrendReport,
}

fn probe(hs: &[f64], config: &SolverConfig, build: impl Fn(f64) -> Result<CondenserProblem>) -> Result<ProbeReport> {
    let mut hs = hs.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    hs.dedup();
    if hs.len() < 3 {
        return Err(Error::TrendUndecidable(format!("{} refinement levels, need at least 3", hs.len())));
    }
    let mut records = Vec::new();
    for &h in &hs {
        let pr = build(h)?;
        let r = capacity(&pr, config)?;
        records.push(CapacityRecord::new(&pr, &r));
    }
    let values: Vec<f64> = records.iter().map(|r| r.capacity).collect();
    let trend = classify_trend(&hs, &values)?;
    Ok(ProbeReport { records, trend })
}

/// Capacity of the single cell at the center of the unit ball across `hs`.
pub fn point_capacity_probe(p: f64, dim: usize, hs: &[f64], config: &SolverConfig) -> Result<ProbeReport> {
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension must be 2 or 3, got {dim}")));
    }
    let outer = Ball::new([0.0; 3], 1.0)?;
    probe(hs, config, |h| CondenserProblem::point(dim, [0.0; 3], outer.clone(), p, h))
}

/// Capacity of a centered one-cell-thick segment of the given length in the
/// unit ball across `hs`.
pub fn segment_capacity_probe(
    p: f64,
    dim: usize,
    length: f64,
    hs: &[f64],
    config: &SolverConfig,
) -> Result<ProbeReport> {
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension must be 2 or 3, got {dim}")));
    }
    if !(length > 0.0 && length < 2.0) {
        return Err(Error::InvalidArgument(format!("segment length must lie in (0, 2), got {length}")));
    }
    let outer = Ball::new([0.0; 3], 1.0)?;
    let half = 0.5 * length;
    probe(hs, config, |h| CondenserProblem::segment(dim, [-half, 0.0, 0.0], [half, 0.0, 0.0], outer.clone(), p, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trend::TrendClass;

    #[test]
    fn constant_is_a_proper_fraction() {
        // a subset of the closed ball has at most the ball's capacity
        for p in [1.5, 3.0] {
            let c = reference_constant(2, p, 16, &SolverConfig::default()).unwrap();
            assert!(c > 0.0 && c < 1.0, "p={p}: {c}");
        }
    }

    #[test]
    fn endpoint_anchor_reproduces_the_constant() {
        let rep = butr_ratio_check(2.0, 0.5, 2.0, 2, 16, &SolverConfig::default()).unwrap();
        assert!(rep.pass);
        let end = &rep.anchors[1];
        assert!(end.margin.abs() < 1e-5, "{}", end.margin);
        assert!(rep.anchors[0].margin > 0.0);
    }

    #[test]
    fn hypothesis_is_enforced() {
        let cfg = SolverConfig::default();
        assert!(matches!(butr_ratio_check(2.0, 0.5, 1.5, 3, 8, &cfg), Err(Error::HypothesisViolated(_))));
        assert!(matches!(butr_ratio_check(1.0, 0.5, 2.0, 2, 8, &cfg), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn planar_point_capacity_trends() {
        let cfg = SolverConfig::default();
        let hs = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];
        let pos = point_capacity_probe(3.0, 2, &hs, &cfg).unwrap();
        assert_eq!(pos.trend.class, TrendClass::Positive, "{:?}", pos.trend);
        let dec = point_capacity_probe(1.8, 2, &hs, &cfg).unwrap();
        assert_eq!(dec.trend.class, TrendClass::Decaying, "{:?}", dec.trend);
    }

    #[test]
    fn probe_needs_three_levels() {
        let err = point_capacity_probe(3.0, 2, &[0.1, 0.05], &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::TrendUndecidable(_)));
    }
}
