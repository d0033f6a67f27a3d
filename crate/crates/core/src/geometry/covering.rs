use super::{dist2, edt, Ball, GridDomain};
use crate::error::{Error, Result};

/// Boundary-centered balls of a common radius covering a domain, split into
/// subsets whose members are pairwise disjoint.
#[derive(Clone, Debug)]
pub struct Covering {
    pub balls: Vec<Ball>,
    pub subset: Vec<usize>,
    pub subset_count: usize,
    /// Discrete inradius the radius was derived from.
    pub inradius: f64,
}

impl Covering {
    pub fn radius(&self) -> f64 {
        self.balls.first().map_or(0.0, |b| b.radius)
    }

    /// Balls belonging to subset `s`.
    pub fn members(&self, s: usize) -> impl Iterator<Item = &Ball> {
        self.balls.iter().zip(&self.subset).filter(move |(_, &k)| k == s).map(|(b, _)| b)
    }
}

/// Upper bound on the number of disjoint subsets: `ceil((2 sqrt(N) + 4)^N)`.
pub fn subset_budget(dim: usize) -> usize {
    let n = dim as f64;
    (2.0 * n.sqrt() + 4.0).powi(dim as i32).ceil() as usize
}

/// Covers the domain with balls of radius `rho * (1 + sqrt(N))` centered on
/// discrete boundary cells.
///
/// Centers are chosen greedily: the first uncovered domain cell (in lattice
/// order) contributes a ball at its nearest boundary cell, which is at most
/// `rho` away. Subsets come from first-fit coloring of the intersection graph.
pub fn hayman_cover(domain: &GridDomain) -> Result<Covering> {
    let dim = domain.dim();
    let rho = edt::inradius(domain);
    let radius = rho * (1.0 + (dim as f64).sqrt());
    let boundary = domain.boundary_cells();
    let boundary_pts: Vec<_> = boundary.iter().map(|&b| domain.center(b)).collect();

    let mut covered = vec![false; domain.len()];
    let mut balls: Vec<Ball> = Vec::new();
    let h = domain.h();
    let reach = (radius / h).ceil() as isize;
    for cell in domain.inside_cells() {
        if covered[cell] {
            continue;
        }
        let x = domain.center(cell);
        let (nearest, _) = boundary_pts
            .iter()
            .enumerate()
            .map(|(k, p)| (k, dist2(p, &x)))
            .fold((usize::MAX, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let center = boundary[nearest];
        let ball = Ball::new(domain.center(center), radius)?;
        mark_covered(domain, center, reach, &ball, &mut covered);
        debug_assert!(covered[cell]);
        balls.push(ball);
    }

    let mut subset = Vec::with_capacity(balls.len());
    let mut subset_count = 0;
    for (i, b) in balls.iter().enumerate() {
        let mut taken = vec![false; subset_count + 1];
        for (j, other) in balls[..i].iter().enumerate() {
            if !b.is_disjoint(other) {
                taken[subset[j]] = true;
            }
        }
        let s = taken.iter().position(|&t| !t).unwrap();
        subset_count = subset_count.max(s + 1);
        subset.push(s);
    }

    let budget = subset_budget(dim);
    if subset_count > budget {
        return Err(Error::CoveringBudget { used: subset_count, budget });
    }
    Ok(Covering { balls, subset, subset_count, inradius: rho })
}

fn mark_covered(domain: &GridDomain, center: usize, reach: isize, ball: &Ball, covered: &mut [bool]) {
    let dim = domain.dim();
    let c = domain.coords(center);
    let shape = domain.shape();
    let range = |k: usize| {
        if k >= dim {
            return 0..1;
        }
        let lo = (c[k] as isize - reach).max(0) as usize;
        let hi = ((c[k] as isize + reach + 1) as usize).min(shape[k]);
        lo..hi
    };
    for k2 in range(2) {
        for k1 in range(1) {
            for k0 in range(0) {
                let idx = domain.index([k0, k1, k2]);
                if domain.is_inside(idx) && ball.contains(&domain.center(idx)) {
                    covered[idx] = true;
                }
            }
        }
    }
}

/// Checks the four covering invariants against `domain`; returns a
/// description of the first violation.
pub fn check_covering(domain: &GridDomain, cover: &Covering) -> std::result::Result<(), String> {
    let boundary: std::collections::HashSet<usize> = domain.boundary_cells().into_iter().collect();
    let r = cover.radius();
    for b in &cover.balls {
        if (b.radius - r).abs() > 1e-12 * r {
            return Err("radii differ".into());
        }
        match domain.nearest_cell(&b.center) {
            Some(c) if boundary.contains(&c) && dist2(&domain.center(c), &b.center) < 1e-18 => {}
            _ => return Err(format!("center {:?} is not a boundary cell", b.center)),
        }
    }
    for cell in domain.inside_cells() {
        let x = domain.center(cell);
        if !cover.balls.iter().any(|b| b.contains(&x)) {
            return Err(format!("cell {cell} not covered"));
        }
    }
    for i in 0..cover.balls.len() {
        for j in 0..i {
            if cover.subset[i] == cover.subset[j] && !cover.balls[i].is_disjoint(&cover.balls[j]) {
                return Err(format!("balls {i} and {j} overlap within subset {}", cover.subset[i]));
            }
        }
    }
    if cover.subset_count > subset_budget(domain.dim()) {
        return Err("subset budget exceeded".into());
    }
    Ok(())
}
