use super::{dist2, GridDomain, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Lobe radius and center offset of the dumbbell family.
const LOBE_RADIUS: f64 = 0.5;
const LOBE_OFFSET: f64 = 0.75;

/// Parametric description of a generated domain family member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    /// `(0, length)` on the line.
    Interval { length: f64 },
    /// Axis-aligned box `(0, a) x (0, b) [x (0, c)]`; a rectangle in the plane.
    Box { lengths: Vec<f64> },
    /// Ball of the given radius centered at the origin.
    Ball { dim: usize, radius: f64 },
    /// `inner < |x| < outer`.
    Annulus { dim: usize, inner: f64, outer: f64 },
    /// Ball with the single lattice cell nearest to each point removed.
    PuncturedBall { dim: usize, radius: f64, punctures: Vec<Point> },
    /// Ball with radial slits of the given width cut from the boundary sphere
    /// down to `inner_radius`.
    SpikedBall { dim: usize, radius: f64, spikes: usize, width: f64, inner_radius: f64 },
    /// Two balls of radius 1/2 centered at `(+-3/4, 0, ..)` joined by a neck.
    Dumbbell { dim: usize, neck_width: f64 },
}

impl DomainSpec {
    pub fn rectangle(a: f64, b: f64) -> Self {
        DomainSpec::Box { lengths: vec![a, b] }
    }

    pub fn ball(dim: usize, radius: f64) -> Self {
        DomainSpec::Ball { dim, radius }
    }

    /// Ball of radius `radius` with `count` punctures laid out by [`puncture_points`].
    pub fn punctured_ball(dim: usize, radius: f64, count: usize) -> Self {
        DomainSpec::PuncturedBall { dim, radius, punctures: puncture_points(dim, radius, count) }
    }

    pub fn spiked_ball(dim: usize, radius: f64, spikes: usize, width: f64) -> Self {
        DomainSpec::SpikedBall { dim, radius, spikes, width, inner_radius: 0.25 * radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::Box { lengths } => lengths.len(),
            DomainSpec::Ball { dim, .. }
            | DomainSpec::Annulus { dim, .. }
            | DomainSpec::PuncturedBall { dim, .. }
            | DomainSpec::SpikedBall { dim, .. }
            | DomainSpec::Dumbbell { dim, .. } => *dim,
        }
    }

    /// Parses `kind:arg,arg,...` as used on the command line, e.g. `ball:1`,
    /// `rectangle:2,1`, `punctured-ball:1,4`, `spiked-ball:1,8,0.04`.
    /// Round shapes take their dimension from `dim`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let (kind, args) = text.split_once(':').unwrap_or((text, ""));
        let nums = args
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_length(s.trim()))
            .collect::<Result<Vec<_>>>()?;
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if nums.len() < lo || nums.len() > hi {
                Err(Error::InvalidArgument(format!(
                    "`{kind}` takes {lo}..={hi} arguments, got {}",
                    nums.len()
                )))
            } else {
                Ok(())
            }
        };
        let spec = match kind.trim() {
            "interval" => {
                arity(1, 1)?;
                DomainSpec::Interval { length: nums[0] }
            }
            "rectangle" => {
                arity(2, 2)?;
                DomainSpec::rectangle(nums[0], nums[1])
            }
            "square" => {
                arity(0, 1)?;
                let a = nums.first().copied().unwrap_or(1.0);
                DomainSpec::Box { lengths: vec![a; dim.max(2)] }
            }
            "box" => {
                arity(1, 3)?;
                DomainSpec::Box { lengths: nums }
            }
            "ball" | "disc" => {
                arity(1, 1)?;
                DomainSpec::ball(dim, nums[0])
            }
            "annulus" | "shell" => {
                arity(2, 2)?;
                DomainSpec::Annulus { dim, inner: nums[0], outer: nums[1] }
            }
            "punctured-ball" => {
                arity(1, 2)?;
                let count = nums.get(1).copied().unwrap_or(1.0);
                DomainSpec::punctured_ball(dim, nums[0], as_count(count)?)
            }
            "spiked-ball" => {
                arity(3, 4)?;
                let mut s = DomainSpec::spiked_ball(dim, nums[0], as_count(nums[1])?, nums[2]);
                if let (Some(&r), DomainSpec::SpikedBall { inner_radius, .. }) = (nums.get(3), &mut s) {
                    *inner_radius = r;
                }
                s
            }
            "dumbbell" => {
                arity(1, 1)?;
                DomainSpec::Dumbbell { dim, neck_width: nums[0] }
            }
            other => {
                return Err(Error::InvalidArgument(format!("unknown domain kind `{other}`")));
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let pos = |v: f64, what: &str| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{what} must be positive, got {v}")))
            }
        };
        let d = self.dim();
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidArgument(format!("dimension {d} not in 1..=3")));
        }
        match self {
            DomainSpec::Interval { length } => pos(*length, "length"),
            DomainSpec::Box { lengths } => lengths.iter().try_for_each(|&l| pos(l, "side length")),
            DomainSpec::Ball { radius, .. } | DomainSpec::PuncturedBall { radius, .. } => pos(*radius, "radius"),
            DomainSpec::Annulus { inner, outer, .. } => {
                pos(*inner, "inner radius")?;
                if outer <= inner {
                    return Err(Error::InvalidArgument("annulus needs inner < outer".into()));
                }
                Ok(())
            }
            DomainSpec::SpikedBall { radius, width, inner_radius, spikes, .. } => {
                pos(*radius, "radius")?;
                pos(*width, "spike width")?;
                if *spikes == 0 || !(0.0..*radius).contains(inner_radius) {
                    return Err(Error::InvalidArgument("spikes need 0 <= inner radius < radius".into()));
                }
                Ok(())
            }
            DomainSpec::Dumbbell { neck_width, .. } => {
                pos(*neck_width, "neck width")?;
                if *neck_width >= 2.0 * LOBE_RADIUS {
                    return Err(Error::InvalidArgument("neck wider than the lobes".into()));
                }
                Ok(())
            }
        }
    }

    fn bounds(&self) -> (Point, Point) {
        let d = self.dim();
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        match self {
            DomainSpec::Interval { length } => hi[0] = *length,
            DomainSpec::Box { lengths } => hi[..d].copy_from_slice(lengths),
            DomainSpec::Ball { radius: r, .. }
            | DomainSpec::PuncturedBall { radius: r, .. }
            | DomainSpec::SpikedBall { radius: r, .. }
            | DomainSpec::Annulus { outer: r, .. } => {
                for k in 0..d {
                    lo[k] = -r;
                    hi[k] = *r;
                }
            }
            DomainSpec::Dumbbell { .. } => {
                lo[0] = -(LOBE_OFFSET + LOBE_RADIUS);
                hi[0] = LOBE_OFFSET + LOBE_RADIUS;
                for k in 1..d {
                    lo[k] = -LOBE_RADIUS;
                    hi[k] = LOBE_RADIUS;
                }
            }
        }
        (lo, hi)
    }

    /// Strict membership of the continuous shape, before punctures.
    fn contains(&self, x: &Point, tol: f64) -> bool {
        let d = self.dim();
        let norm = |x: &Point| dist2(x, &[0.0; 3]).sqrt();
        match self {
            DomainSpec::Interval { length } => x[0] > tol && x[0] < length - tol,
            DomainSpec::Box { lengths } => (0..d).all(|k| x[k] > tol && x[k] < lengths[k] - tol),
            DomainSpec::Ball { radius, .. } | DomainSpec::PuncturedBall { radius, .. } => norm(x) < radius - tol,
            DomainSpec::Annulus { inner, outer, .. } => {
                let r = norm(x);
                r > inner + tol && r < outer - tol
            }
            DomainSpec::SpikedBall { dim, radius, spikes, width, inner_radius } => {
                if norm(x) >= radius - tol {
                    return false;
                }
                let half = 0.5 * width;
                !spike_directions(*dim, *spikes).iter().any(|dir| {
                    let a = dir.map(|c| c * inner_radius);
                    let b = dir.map(|c| c * 2.0 * radius);
                    segment_dist2(x, &a, &b) < half * half
                })
            }
            DomainSpec::Dumbbell { neck_width, .. } => {
                let lobe = |c: f64| {
                    let y = [x[0] - c, x[1], x[2]];
                    norm(&y) < LOBE_RADIUS - tol
                };
                let transverse = (x[1] * x[1] + x[2] * x[2]).sqrt();
                let neck = x[0].abs() <= LOBE_OFFSET && transverse < 0.5 * neck_width - tol;
                lobe(-LOBE_OFFSET) || lobe(LOBE_OFFSET) || neck
            }
        }
    }

    fn check_resolution(&self, h: f64) -> Result<()> {
        match self {
            DomainSpec::SpikedBall { width, .. } if *width < 2.0 * h * (1.0 - 1e-9) => {
                Err(Error::UnderResolved(format!("spike width {width} < 2h = {}", 2.0 * h)))
            }
            DomainSpec::Dumbbell { neck_width, .. } if *neck_width < 2.0 * h * (1.0 - 1e-9) => {
                Err(Error::UnderResolved(format!("neck width {neck_width} < 2h = {}", 2.0 * h)))
            }
            DomainSpec::Annulus { inner, outer, .. } if outer - inner < 2.0 * h => {
                Err(Error::UnderResolved(format!("annulus gap {} < 2h", outer - inner)))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        match self {
            DomainSpec::Interval { length } => write!(f, "interval({length})"),
            DomainSpec::Box { lengths } if lengths.len() == 2 => write!(f, "rectangle({})", join(lengths)),
            DomainSpec::Box { lengths } => write!(f, "box({})", join(lengths)),
            DomainSpec::Ball { dim, radius } => write!(f, "ball{dim}d({radius})"),
            DomainSpec::Annulus { dim, inner, outer } => write!(f, "annulus{dim}d({inner},{outer})"),
            DomainSpec::PuncturedBall { dim, radius, punctures } => {
                write!(f, "punctured-ball{dim}d({radius},{})", punctures.len())
            }
            DomainSpec::SpikedBall { dim, radius, spikes, width, inner_radius } => {
                write!(f, "spiked-ball{dim}d({radius},{spikes},{width},{inner_radius})")
            }
            DomainSpec::Dumbbell { dim, neck_width } => write!(f, "dumbbell{dim}d({neck_width})"),
        }
    }
}

fn as_count(v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(Error::InvalidArgument(format!("expected a positive count, got {v}")))
    }
}

/// Parses a decimal or a fraction such as `1/128`.
pub fn parse_length(s: &str) -> Result<f64> {
    let bad = || Error::InvalidArgument(format!("cannot parse `{s}` as a number"));
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            n / d
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn segment_dist2(x: &Point, a: &Point, b: &Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let ax = [x[0] - a[0], x[1] - a[1], x[2] - a[2]];
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let t = (ax.iter().zip(&ab).map(|(u, v)| u * v).sum::<f64>() / len2).clamp(0.0, 1.0);
    let p = [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]];
    dist2(x, &p)
}

/// Unit directions of the spikes: evenly spaced angles in the plane; in space
/// the coordinate axes (6), cube diagonals (8), both (14), all lattice
/// neighbours (26), or a Fibonacci sphere otherwise.
pub fn spike_directions(dim: usize, count: usize) -> Vec<Point> {
    match dim {
        1 => vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]].into_iter().take(count).collect(),
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / count as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect(),
        _ => {
            let lattice = |pred: &dyn Fn(i32) -> bool| {
                let mut v = Vec::new();
                for a in -1i32..=1 {
                    for b in -1i32..=1 {
                        for c in -1i32..=1 {
                            let nz = (a != 0) as i32 + (b != 0) as i32 + (c != 0) as i32;
                            if pred(nz) {
                                let n = (nz as f64).sqrt();
                                v.push([a as f64 / n, b as f64 / n, c as f64 / n]);
                            }
                        }
                    }
                }
                v
            };
            match count {
                6 => lattice(&|nz| nz == 1),
                8 => lattice(&|nz| nz == 3),
                14 => lattice(&|nz| nz == 1 || nz == 3),
                26 => lattice(&|nz| nz > 0),
                _ => fibonacci_sphere(count),
            }
        }
    }
}

fn fibonacci_sphere(count: usize) -> Vec<Point> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * k as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

/// Puncture layout of the versioned families: one puncture at the center, or
/// `count` points spread over the sphere of radius `radius / 2`.
pub fn puncture_points(dim: usize, radius: f64, count: usize) -> Vec<Point> {
    if count <= 1 {
        return vec![[0.0; 3]];
    }
    let dirs = match dim {
        2 => spike_directions(2, count),
        3 => fibonacci_sphere(count),
        _ => vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]].into_iter().take(count).collect(),
    };
    dirs.into_iter().map(|d| d.map(|c| c * 0.5 * radius)).collect()
}

/// Rasterizes a family member at spacing `h`.
///
/// The lattice origin is a multiple of `h`, so the origin itself and any
/// lattice-aligned boundary coincide with cell centers. Fails when a thin
/// feature is narrower than `2h` or the carved mask falls apart.
pub fn generate_domain(spec: &DomainSpec, h: f64) -> Result<GridDomain> {
    spec.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {h}")));
    }
    spec.check_resolution(h)?;
    let dim = spec.dim();
    let (lo, hi) = spec.bounds();
    let mut first = [0i64; 3];
    let mut shape = [1usize; 3];
    let mut origin = [0.0; 3];
    for k in 0..dim {
        first[k] = (lo[k] / h + 1e-9).floor() as i64 - 1;
        let last = (hi[k] / h - 1e-9).ceil() as i64 + 1;
        shape[k] = (last - first[k] + 1) as usize;
        origin[k] = first[k] as f64 * h;
    }
    let len: usize = shape.iter().product();
    let tol = 1e-9 * h;
    let mut mask = vec![false; len];
    for (idx, m) in mask.iter_mut().enumerate() {
        let c = [idx % shape[0], (idx / shape[0]) % shape[1], idx / (shape[0] * shape[1])];
        let mut x = [0.0; 3];
        for k in 0..dim {
            x[k] = (first[k] + c[k] as i64) as f64 * h;
        }
        *m = spec.contains(&x, tol);
    }
    if let DomainSpec::PuncturedBall { punctures, .. } = spec {
        let before = mask.iter().filter(|&&b| b).count();
        for p in punctures {
            let mut c = [0usize; 3];
            for k in 0..dim {
                c[k] = ((p[k] - origin[k]) / h).round().clamp(0.0, (shape[k] - 1) as f64) as usize;
            }
            let idx = c[0] + shape[0] * (c[1] + shape[1] * c[2]);
            if !mask[idx] && spec.contains(p, tol) {
                return Err(Error::UnderResolved("punctures coincide at this resolution".into()));
            }
            if !mask[idx] {
                return Err(Error::InvalidArgument(format!("puncture {p:?} is not inside the ball")));
            }
            mask[idx] = false;
        }
        debug_assert_eq!(mask.iter().filter(|&&b| b).count(), before - punctures.len());
    }
    GridDomain::new(dim, h, origin, shape, mask, spec.to_string())
}
