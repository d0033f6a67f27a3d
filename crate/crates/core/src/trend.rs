//! Refinement-trend classification of positive quantities.
//!
//! A series `c(h)` either tends to a positive limit, `c = c_inf + A h^beta`,
//! or decays to zero, at least as slowly as `1 / log(1/h)` in the cases of
//! interest. The reciprocal `r = 1/c` separates the two: its increments per
//! unit of `log(1/h)` shrink like `h^beta` when the limit is positive and stay
//! bounded below (logarithmic decay) or grow (power decay) otherwise. Each
//! window of three consecutive levels yields the local exponent `beta` of
//! those increments, and a window counts as decaying iff `beta` is at most
//! [`DECAY_EXPONENT`].

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest local increment exponent still read as decay. Logarithmic decay
/// has exponent 0 up to `O(h)` corrections; the slowest positive limits
/// probed converge like `h^(1/2)`.
pub const DECAY_EXPONENT: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendClass {
    /// Tends to a positive limit.
    Positive,
    /// Tends to zero.
    Decaying,
}

impl std::fmt::Display for TrendClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrendClass::Positive => "positive",
            TrendClass::Decaying => "decaying",
        })
    }
}

/// Series over refinement levels with its classification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrendReport {
    /// Grid spacings, strictly decreasing.
    pub h: Vec<f64>,
    pub values: Vec<f64>,
    /// Class of the finest window.
    pub class: TrendClass,
    /// Class of every window of three consecutive levels, coarsest first.
    pub windows: Vec<TrendClass>,
    /// Local increment exponent of every window; `NaN` where undefined.
    pub exponents: Vec<f64>,
    /// All windows agree.
    pub stable: bool,
    /// Extrapolated limit from the finest window, 0 when decaying.
    pub limit: f64,
}

/// Classifies `values` sampled at the strictly decreasing spacings `h`.
pub fn classify_trend(h: &[f64], values: &[f64]) -> Result<TrendReport> {
    if h.len() != values.len() {
        return Err(Error::InvalidArgument("spacings and values differ in length".into()));
    }
    if h.len() < 3 {
        return Err(Error::TrendUndecidable(format!("{} refinement levels, need at least 3", h.len())));
    }
    if h.iter().any(|&x| !(x > 0.0 && x.is_finite())) || h.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("spacings must be positive and strictly decreasing".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite value in trend series".into()));
    }
    let mut windows = Vec::new();
    let mut exponents = Vec::new();
    let mut limit = 0.0;
    for k in 0..h.len() - 2 {
        let (class, beta, lim) = classify_window(&h[k..k + 3], &values[k..k + 3]);
        windows.push(class);
        exponents.push(beta);
        limit = lim;
    }
    let class = *windows.last().unwrap();
    let stable = windows.iter().all(|&c| c == class);
    Ok(TrendReport { h: h.to_vec(), values: values.to_vec(), class, windows, exponents, stable, limit })
}

fn classify_window(h: &[f64], c: &[f64]) -> (TrendClass, f64, f64) {
    if c.iter().any(|&v| v <= 0.0) {
        return (TrendClass::Decaying, f64::NAN, 0.0);
    }
    let r: Vec<f64> = c.iter().map(|v| 1.0 / v).collect();
    let s1 = (h[0] / h[1]).ln();
    let s2 = (h[1] / h[2]).ln();
    let d1 = (r[1] - r[0]) / s1;
    let d2 = (r[2] - r[1]) / s2;
    if d2 <= 0.0 || d1 <= 0.0 {
        // the reciprocal stopped growing: no decay at the fine end
        return (TrendClass::Positive, f64::NAN, c[2]);
    }
    // increments sit at the geometric midpoints of their intervals
    let beta = (d1 / d2).ln() / (0.5 * (s1 + s2));
    if beta <= DECAY_EXPONENT {
        return (TrendClass::Decaying, beta, 0.0);
    }
    // geometric tail of the reciprocal increments at the finest ratio
    let q = (-beta * s2).exp();
    let r_inf = r[2] + d2 * s2 * q / (1.0 - q);
    (TrendClass::Positive, beta, 1.0 / r_inf)
}
