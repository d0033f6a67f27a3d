//! Exact Euclidean distance transform by dimensional reduction.
//!
//! Each axis is processed with the lower-envelope-of-parabolas pass of
//! Felzenszwalb and Huttenlocher, so after the last axis every entry holds the
//! exact squared distance (in cell units) to the nearest feature cell.

use super::GridDomain;

/// Squared distance, in cell units, from every cell to the nearest cell with
/// `feature[i] == true`. Cells are laid out with the first axis fastest.
/// Entries are `f64::INFINITY` when no feature cell exists.
pub fn squared_distance_transform(shape: [usize; 3], feature: &[bool]) -> Vec<f64> {
    let mut d: Vec<f64> = feature.iter().map(|&f| if f { 0.0 } else { f64::INFINITY }).collect();
    let strides = [1, shape[0], shape[0] * shape[1]];
    let len = d.len();
    let max_n = shape.iter().copied().max().unwrap_or(1);
    let mut line = vec![0.0; max_n];
    let mut out = vec![0.0; max_n];
    let mut v = vec![0usize; max_n];
    let mut z = vec![0.0; max_n + 1];
    for axis in 0..3 {
        let n = shape[axis];
        if n <= 1 {
            continue;
        }
        let stride = strides[axis];
        for start in 0..len {
            // visit each line once, from its first cell along `axis`
            if (start / stride) % n != 0 {
                continue;
            }
            for (i, l) in line[..n].iter_mut().enumerate() {
                *l = d[start + i * stride];
            }
            envelope(&line[..n], &mut out[..n], &mut v, &mut z);
            for (i, &o) in out[..n].iter().enumerate() {
                d[start + i * stride] = o;
            }
        }
    }
    d
}

fn envelope(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let Some(first) = f.iter().position(|x| x.is_finite()) else {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    };
    let mut k = 0;
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        let qf = q as f64;
        loop {
            let p = v[k];
            let pf = p as f64;
            let s = ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf));
            // z[0] is -inf, so this never pops the first parabola
            if s <= z[k] {
                k -= 1;
                continue;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        let qf = q as f64;
        while z[k + 1] < qf {
            k += 1;
        }
        let p = v[k] as f64;
        *o = (qf - p) * (qf - p) + f[v[k]];
    }
}

/// Euclidean distance from every cell center to the nearest false cell
/// center, in length units. False cells report 0.
pub fn distance_field(domain: &GridDomain) -> Vec<f64> {
    let feature: Vec<bool> = domain.mask().iter().map(|&m| !m).collect();
    let h = domain.h();
    squared_distance_transform(domain.shape(), &feature)
        .into_iter()
        .map(|s| s.sqrt() * h)
        .collect()
}

/// Discrete inradius: the largest distance from a domain cell to the nearest
/// false cell.
///
/// The discrete value differs from the continuous inradius by at most
/// [`inradius_error_bound`] (`h * sqrt(N)`): both the ball center and the
/// nearest boundary point are located to within half a cell diagonal.
pub fn inradius(domain: &GridDomain) -> f64 {
    let d = distance_field(domain);
    domain.inside_cells().map(|i| d[i]).fold(0.0, f64::max)
}

pub fn inradius_error_bound(domain: &GridDomain) -> f64 {
    domain.h() * (domain.dim() as f64).sqrt()
}
