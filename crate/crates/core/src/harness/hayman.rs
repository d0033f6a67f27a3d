//! Eigenvalue gap of a ball with thin features removed, across refinement.

use super::solve_case;
use crate::eigen::SolverConfig;
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::trend::{classify_trend, TrendReport};
use serde::{Deserialize, Serialize};

/// Features carved from the unit ball. Their thickness follows the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Feature {
    /// Single-cell punctures laid out by [`crate::geometry::puncture_points`].
    Punctures { count: usize },
    /// Radial slits of width `2h`, the thinnest the generator accepts.
    Spikes { count: usize },
}

impl Feature {
    fn spec(&self, dim: usize, h: f64) -> DomainSpec {
        match *self {
            Feature::Punctures { count } => DomainSpec::punctured_ball(dim, 1.0, count),
            Feature::Spikes { count } => DomainSpec::spiked_ball(dim, 1.0, count, 2.0 * h),
        }
    }
}

impl std::fmt::Display for Feature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Feature::Punctures { count } => write!(f, "punctures:{count}"),
            Feature::Spikes { count } => write!(f, "spikes:{count}"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HaymanLevel {
    pub h: f64,
    pub lambda_base: f64,
    pub lambda_featured: f64,
    /// `lambda_featured - lambda_base`.
    pub gap: f64,
    pub inradius_featured: f64,
    /// `lambda_featured * rho^p` of the featured domain.
    pub product_featured: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HaymanReport {
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: f64,
    pub feature: Feature,
    pub levels: Vec<HaymanLevel>,
    /// Trend of the gap.
    pub trend: TrendReport,
}

/// Solves the unit ball with and without `feature` at every spacing in `hs`
/// and classifies the trend of the eigenvalue gap.
pub fn hayman_experiment(dim: usize, feature: Feature, p: f64, hs: &[f64], config: &SolverConfig) -> Result<HaymanReport> {
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension must be 2 or 3, got {dim}")));
    }
    let mut hs = hs.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    hs.dedup();
    if hs.len() < 3 {
        return Err(Error::TrendUndecidable(format!("{} refinement levels, need at least 3", hs.len())));
    }
    let mut levels = Vec::new();
    for &h in &hs {
        let base = solve_case("ball", &DomainSpec::ball(dim, 1.0), h, p, config)?;
        let feat = solve_case(&feature.to_string(), &feature.spec(dim, h), h, p, config)?;
        levels.push(HaymanLevel {
            h,
            lambda_base: base.result.lambda,
            lambda_featured: feat.result.lambda,
            gap: feat.result.lambda - base.result.lambda,
            inradius_featured: feat.inradius,
            product_featured: feat.product(),
            converged: base.result.converged && feat.result.converged,
        });
    }
    if let Some(l) = levels.iter().find(|l| !l.converged) {
        return Err(Error::NotConverged(format!("eigenpair at h = {}", l.h)));
    }
    let gaps: Vec<f64> = levels.iter().map(|l| l.gap).collect();
    let trend = classify_trend(&hs, &gaps)?;
    Ok(HaymanReport { dim, p, feature, levels, trend })
}
