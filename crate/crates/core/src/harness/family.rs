//! Versioned domain families of the sweeps.
//!
//! Straight edges sit on lattice lines for every `h = 2^-k <= 1/8`, so each
//! thin side spans an odd number of cells and the discrete inradius is
//! exactly half its width.

use crate::geometry::DomainSpec;
use serde::{Deserialize, Serialize};

/// Bumped whenever a member of a family changes.
pub const FAMILY_VERSION: u32 = 1;

/// Spike width of the adversarial spiked ball, per dimension; resolved for
/// `h <= 1/32` in the plane and `h <= 1/16` in space.
pub const SPIKE_WIDTH_2D: f64 = 1.0 / 16.0;
pub const SPIKE_WIDTH_3D: f64 = 1.0 / 8.0;

/// Radius the spikes of the family reach down to. Deeper spikes cut the ball
/// into nearly decoupled sectors whose eigenvalue cluster stalls the solver.
pub const SPIKE_INNER_RADIUS: f64 = 0.5;

/// Named member of a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainCase {
    pub label: String,
    pub spec: DomainSpec,
}

impl DomainCase {
    pub fn new(label: impl Into<String>, spec: DomainSpec) -> Self {
        Self { label: label.into(), spec }
    }
}

fn boxed(dim: usize, long: f64, short: f64) -> DomainSpec {
    let mut lengths = vec![short; dim];
    lengths[0] = long;
    DomainSpec::Box { lengths }
}

/// Ball, cube, 2:1 and 20:1 boxes, annulus, dumbbell, 8-spike ball and the
/// 1-, 4- and 16-puncture balls, in dimension 2 or 3.
pub fn adversarial_family(dim: usize) -> Vec<DomainCase> {
    let width = if dim == 2 { SPIKE_WIDTH_2D } else { SPIKE_WIDTH_3D };
    vec![
        DomainCase::new("ball", DomainSpec::ball(dim, 1.0)),
        DomainCase::new("cube", boxed(dim, 1.0, 1.0)),
        DomainCase::new("box-2:1", boxed(dim, 2.0, 1.0)),
        DomainCase::new("box-20:1", boxed(dim, 5.0, 0.25)),
        DomainCase::new("annulus", DomainSpec::Annulus { dim, inner: 0.5, outer: 1.0 }),
        DomainCase::new("dumbbell", DomainSpec::Dumbbell { dim, neck_width: 0.25 }),
        DomainCase::new(
            "spiked-8",
            DomainSpec::SpikedBall { dim, radius: 1.0, spikes: 8, width, inner_radius: SPIKE_INNER_RADIUS },
        ),
        DomainCase::new("punctured-1", DomainSpec::punctured_ball(dim, 1.0, 1)),
        DomainCase::new("punctured-4", DomainSpec::punctured_ball(dim, 1.0, 4)),
        DomainCase::new("punctured-16", DomainSpec::punctured_ball(dim, 1.0, 16)),
    ]
}

/// Planar rectangles of short side 1/4 and aspect 1, 2, 5, 10 and 20.
pub fn thin_rectangle_family() -> Vec<DomainCase> {
    [1.0, 2.0, 5.0, 10.0, 20.0]
        .into_iter()
        .map(|a| DomainCase::new(format!("rectangle-{a}:1"), DomainSpec::rectangle(0.25 * a, 0.25)))
        .collect()
}

/// Looks a family up by name: `adversarial` or `thin-rectangles`.
pub fn named_family(name: &str, dim: usize) -> Option<Vec<DomainCase>> {
    match (name, dim) {
        ("adversarial", 2 | 3) => Some(adversarial_family(dim)),
        ("thin-rectangles", 2) => Some(thin_rectangle_family()),
        _ => None,
    }
}
