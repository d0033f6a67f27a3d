//! Grid domains, the generator families, inradius and the boundary-ball covering.
//!
//! A domain is a boolean mask over a uniform lattice. Cell `i` has center
//! `origin + i * h`; it belongs to the domain iff that center lies strictly
//! inside the continuous shape. Every generated lattice has its origin at an
//! integer multiple of `h`, so the origin and lattice-aligned boundaries land
//! exactly on cell centers and are excluded.

mod covering;
mod edt;
mod spec;

pub use covering::{check_covering, hayman_cover, subset_budget, Covering};
pub use edt::{distance_field, inradius, inradius_error_bound, squared_distance_transform};
pub use spec::{generate_domain, parse_length, puncture_points, spike_directions, DomainSpec};

use crate::error::{Error, Result};
use std::collections::VecDeque;

/// Lattice position in up to three dimensions; unused axes are zero.
pub type Point = [f64; 3];

pub(crate) fn dist2(a: &Point, b: &Point) -> f64 {
    (0..3).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum()
}

/// Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    /// Open-ball membership.
    pub fn contains(&self, x: &Point) -> bool {
        dist2(&self.center, x) < self.radius * self.radius
    }

    pub fn is_disjoint(&self, other: &Ball) -> bool {
        let r = self.radius + other.radius;
        dist2(&self.center, &other.center) >= r * r
    }
}

/// Binary occupancy mask on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDomain {
    dim: usize,
    h: f64,
    origin: Point,
    shape: [usize; 3],
    mask: Vec<bool>,
    label: String,
}

impl GridDomain {
    /// Builds a domain and checks every invariant: dimension 1..=3, positive
    /// spacing, a nonempty single face-connected component and a false margin
    /// of at least one cell on every side.
    pub fn new(
        dim: usize,
        h: f64,
        origin: Point,
        shape: [usize; 3],
        mask: Vec<bool>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidDomain(format!("dimension {dim} not in 1..=3")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidDomain(format!("grid spacing must be positive, got {h}")));
        }
        let mut shape = shape;
        for s in shape.iter_mut().skip(dim) {
            if *s > 1 {
                return Err(Error::InvalidDomain("extent given along an unused axis".into()));
            }
            *s = 1;
        }
        let len: usize = shape.iter().product();
        if mask.len() != len {
            return Err(Error::InvalidDomain(format!(
                "mask has {} cells, shape requires {len}",
                mask.len()
            )));
        }
        let domain = Self { dim, h, origin, shape, mask, label: label.into() };
        if domain.cell_count() == 0 {
            return Err(Error::InvalidDomain("mask is empty".into()));
        }
        for idx in 0..len {
            if domain.mask[idx] {
                let c = domain.coords(idx);
                if (0..dim).any(|k| c[k] == 0 || c[k] + 1 == shape[k]) {
                    return Err(Error::InvalidDomain("true cell on the bounding-box margin".into()));
                }
            }
        }
        let components = domain.component_count();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(domain)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Total number of lattice cells in the bounding box.
    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn strides(&self) -> [usize; 3] {
        [1, self.shape[0], self.shape[0] * self.shape[1]]
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let [n0, n1, _] = self.shape;
        [idx % n0, (idx / n0) % n1, idx / (n0 * n1)]
    }

    pub fn index(&self, c: [usize; 3]) -> usize {
        c[0] + self.shape[0] * (c[1] + self.shape[1] * c[2])
    }

    pub fn center(&self, idx: usize) -> Point {
        let c = self.coords(idx);
        let mut x = [0.0; 3];
        for k in 0..self.dim {
            x[k] = self.origin[k] + c[k] as f64 * self.h;
        }
        x
    }

    /// Lattice cell whose center is nearest to `x`, if it lies in the box.
    pub fn nearest_cell(&self, x: &Point) -> Option<usize> {
        let mut c = [0usize; 3];
        for k in 0..self.dim {
            let t = ((x[k] - self.origin[k]) / self.h).round();
            if t < 0.0 || t >= self.shape[k] as f64 {
                return None;
            }
            c[k] = t as usize;
        }
        Some(self.index(c))
    }

    pub fn is_inside(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn cell_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Discrete volume: cell count times `h^N`.
    pub fn volume(&self) -> f64 {
        self.cell_count() as f64 * self.h.powi(self.dim as i32)
    }

    pub fn inside_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    /// Calls `f` for every face neighbour of `idx` inside the box.
    pub fn for_each_neighbor(&self, idx: usize, mut f: impl FnMut(usize)) {
        let c = self.coords(idx);
        let s = self.strides();
        for k in 0..self.dim {
            if c[k] > 0 {
                f(idx - s[k]);
            }
            if c[k] + 1 < self.shape[k] {
                f(idx + s[k]);
            }
        }
    }

    /// False cells face-adjacent to at least one true cell.
    pub fn boundary_cells(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                if self.mask[i] {
                    return false;
                }
                let mut adjacent = false;
                self.for_each_neighbor(i, |j| adjacent |= self.mask[j]);
                adjacent
            })
            .collect()
    }

    /// Extent of the true cells along each axis, in cells.
    pub fn inside_extent(&self) -> [usize; 3] {
        let mut lo = [usize::MAX; 3];
        let mut hi = [0usize; 3];
        for i in self.inside_cells() {
            let c = self.coords(i);
            for k in 0..3 {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
        }
        let mut out = [1; 3];
        for k in 0..self.dim {
            out[k] = hi[k] - lo[k] + 1;
        }
        out
    }

    /// Same mask with every length multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor must be positive, got {t}")));
        }
        let mut origin = self.origin;
        origin.iter_mut().for_each(|o| *o *= t);
        Ok(Self { h: self.h * t, origin, ..self.clone() })
    }

    fn component_count(&self) -> usize {
        label_components(self, |i| self.mask[i]).1
    }
}

/// Face-connected components of the cells selected by `select`. Returns a
/// component id per cell (`usize::MAX` for unselected cells) and the count.
pub(crate) fn label_components(
    domain: &GridDomain,
    select: impl Fn(usize) -> bool,
) -> (Vec<usize>, usize) {
    let n = domain.len();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if label[seed] != usize::MAX || !select(seed) {
            continue;
        }
        label[seed] = count;
        queue.push_back(seed);
        while let Some(i) = queue.pop_front() {
            domain.for_each_neighbor(i, |j| {
                if label[j] == usize::MAX && select(j) {
                    label[j] = count;
                    queue.push_back(j);
                }
            });
        }
        count += 1;
    }
    (label, count)
}

/// Number of connected components of the complement that touch the domain.
///
/// Components are taken over false cells of the bounding box with face
/// adjacency. The margin guarantees the outer complement is a single
/// component, so a simply connected planar domain reports 1.
pub fn boundary_components(domain: &GridDomain) -> usize {
    let (label, count) = label_components(domain, |i| !domain.mask[i]);
    let mut touches = vec![false; count];
    for b in domain.boundary_cells() {
        touches[label[b]] = true;
    }
    touches.into_iter().filter(|&t| t).count()
}
