//! Local Poincare ratios on boundary balls and their capacity-weighted form.

use crate::capacity::{capacity, CondenserProblem};
use crate::eigen::SolverConfig;
use crate::error::{Error, Result};
use crate::field::{ScalarField, Stencil};
use crate::geometry::{dist2, Covering, GridDomain, Point};
use serde::{Deserialize, Serialize};

/// Capacities below this are treated as zero.
const CAPACITY_FLOOR: f64 = 1e-12;

/// `(h^N sum |u|^p, h^N sum |Du|^p)` over the cells whose centers lie in the
/// open ball; differences are attributed to their base cell.
fn ball_integrals(st: &Stencil, domain: &GridDomain, u: &[f64], center: &Point, radius: f64, p: f64) -> (f64, f64) {
    let dim = domain.dim();
    let h = domain.h();
    let shape = domain.shape();
    let origin = domain.origin();
    let mut lo = [0usize; 3];
    let mut hi = [1usize; 3];
    for k in 0..dim {
        let a = ((center[k] - radius - origin[k]) / h).floor().max(0.0) as usize;
        let b = (((center[k] + radius - origin[k]) / h).ceil() as usize + 1).min(shape[k]);
        lo[k] = a.min(shape[k]);
        hi[k] = b;
    }
    let r2 = radius * radius;
    let mut inside = vec![false; domain.len()];
    let mut mass = 0.0;
    for i2 in lo[2]..hi[2] {
        for i1 in lo[1]..hi[1] {
            for i0 in lo[0]..hi[0] {
                let idx = domain.index([i0, i1, i2]);
                if dist2(&domain.center(idx), center) < r2 {
                    inside[idx] = true;
                    mass += u[idx].abs().powf(p);
                }
            }
        }
    }
    let grad = st.energy_density_sum(u, p, |c| inside[c]);
    let hn = st.cell_volume();
    (hn * mass, hn * grad)
}

fn check_boundary_point(domain: &GridDomain, a: &Point) -> Result<()> {
    let h = domain.h();
    let on_lattice = domain.nearest_cell(a).filter(|&c| dist2(&domain.center(c), a) < (1e-6 * h).powi(2));
    let boundary = on_lattice.is_some_and(|c| {
        let mut adjacent = false;
        domain.for_each_neighbor(c, |j| adjacent |= domain.is_inside(j));
        !domain.is_inside(c) && adjacent
    });
    if boundary {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{a:?} is not a boundary cell center")))
    }
}

/// `int_{B_R(a)} |u|^p / (R^p int_{B_R(a)} |Du|^p)` for `u` extended by zero
/// and `a` the center of a boundary cell. Needs `p > N`; a field vanishing on
/// the ball gives 0.
pub fn boundary_ball_poincare(u: &ScalarField, a: &Point, radius: f64, p: f64) -> Result<f64> {
    let domain = u.domain();
    if p <= domain.dim() as f64 {
        return Err(Error::HypothesisViolated(format!("p = {p} <= N = {}", domain.dim())));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    check_boundary_point(domain, a)?;
    let st = Stencil::for_domain(domain);
    let (mass, grad) = ball_integrals(&st, domain, u.values(), a, radius, p);
    if mass == 0.0 {
        return Ok(0.0);
    }
    if grad == 0.0 {
        return Err(Error::DegenerateBall(format!("zero gradient on B_{radius}({a:?})")));
    }
    Ok(mass / (radius.powf(p) * grad))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoincareCapacityReport {
    pub center: Point,
    pub r: f64,
    /// `Cap_p(F, B_2r)` with `F` the complement within the closed `B_r`.
    pub capacity: f64,
    /// `int_{B_r} |u|^p Cap / (r^N int_{B_r} |Du|^p)`.
    pub k_hat: f64,
}

/// Empirical constant of the capacity-weighted Poincare inequality on the
/// ball `B_r(a)` about a boundary cell center `a`.
pub fn poincare_capacity_check(
    u: &ScalarField,
    a: &Point,
    r: f64,
    p: f64,
    config: &SolverConfig,
) -> Result<PoincareCapacityReport> {
    let domain = u.domain();
    check_boundary_point(domain, a)?;
    let problem = CondenserProblem::domain_complement(domain, *a, r, p)?;
    let cap = capacity(&problem, config)?;
    if !cap.converged {
        return Err(Error::NotConverged(format!("capacity of {}", problem.label())));
    }
    if cap.value < CAPACITY_FLOOR {
        return Err(Error::CapacityDegenerate(format!("Cap = {:e} on B_{r}({a:?})", cap.value)));
    }
    let st = Stencil::for_domain(domain);
    let (mass, grad) = ball_integrals(&st, domain, u.values(), a, r, p);
    if grad == 0.0 {
        return Err(Error::DegenerateBall(format!("zero gradient on B_{r}({a:?})")));
    }
    let k_hat = mass * cap.value / (r.powi(domain.dim() as i32) * grad);
    Ok(PoincareCapacityReport { center: *a, r, capacity: cap.value, k_hat })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainReport {
    /// `int |u|^p / (rho^p int |Du|^p)` over the whole domain.
    pub global_ratio: f64,
    /// Largest local ratio over the covering balls.
    pub max_ball_ratio: f64,
    pub subset_count: usize,
    /// `max_ball_ratio * subset_count * (1 + sqrt N)^p`.
    pub bound: f64,
    pub pass: bool,
}

/// Chains the local ratios on the covering balls into a global Poincare
/// bound. Every cell lies in some ball and in at most one ball per subset,
/// so the global ratio cannot exceed `bound`.
pub fn covering_chain_check(u: &ScalarField, cover: &Covering, p: f64) -> Result<ChainReport> {
    let domain = u.domain();
    let st = Stencil::for_domain(domain);
    let v = u.values();
    let hn = st.cell_volume();
    let mass: f64 = hn * v.iter().map(|x| x.abs().powf(p)).sum::<f64>();
    let grad = st.energy(v, p);
    if grad == 0.0 {
        return Err(Error::UndefinedQuotient);
    }
    let radius = cover.radius();
    let mut max_ball_ratio: f64 = 0.0;
    for b in &cover.balls {
        let (m, g) = ball_integrals(&st, domain, v, &b.center, radius, p);
        if m > 0.0 {
            if g == 0.0 {
                return Err(Error::DegenerateBall(format!("zero gradient on covering ball {:?}", b.center)));
            }
            max_ball_ratio = max_ball_ratio.max(m / (radius.powf(p) * g));
        }
    }
    let rho = cover.inradius;
    let global_ratio = mass / (rho.powf(p) * grad);
    let n = domain.dim() as f64;
    let bound = max_ball_ratio * cover.subset_count as f64 * (1.0 + n.sqrt()).powf(p);
    Ok(ChainReport {
        global_ratio,
        max_ball_ratio,
        subset_count: cover.subset_count,
        bound,
        pass: global_ratio <= bound * (1.0 + 1e-12),
    })
}
