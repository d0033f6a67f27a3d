mod common;

use common::{bessel_j0_first_zero, interval_eigenvalue, pi_p, radial_capacity_quadrature};
use plap::capacity::{capacity, radial_capacity, CondenserProblem};
use plap::eigen::SolverConfig;
use plap::field::ScalarField;
use plap::geometry::{
    check_covering, generate_domain, hayman_cover, inradius, inradius_error_bound, parse_length, subset_budget,
    DomainSpec, GridDomain,
};
use plap::io::{field_to_string, mask_to_string, parse_field, parse_mask};
use plap::trend::{classify_trend, TrendClass};
use plap::variational::{rayleigh_gradient, rayleigh_quotient, weak_residual};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn disc(h: f64) -> Arc<GridDomain> {
    Arc::new(generate_domain(&DomainSpec::ball(2, 1.0), h).unwrap())
}

/// Field on `d` from `seed` values cycled over the true cells.
fn field(d: &Arc<GridDomain>, seed: &[f64]) -> ScalarField {
    let mut k = 0;
    let vals = d
        .mask()
        .iter()
        .map(|&m| {
            if !m {
                return 0.0;
            }
            k += 1;
            seed[k % seed.len()]
        })
        .collect();
    ScalarField::new(d.clone(), vals).unwrap()
}

fn seeds() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![-1.0..-0.1, 0.1..1.0f64], 7..31)
}

#[test]
fn oracles_reproduce_closed_forms() {
    assert!((pi_p(2.0) - PI).abs() < 1e-10);
    assert!((interval_eigenvalue(2.0, 1.0) - PI * PI).abs() < 1e-9);
    assert!((bessel_j0_first_zero() - 2.404825557695773).abs() < 1e-7);
    let annulus = radial_capacity_quadrature(0.5, 1.0, 2.0, 2);
    assert!((annulus / (2.0 * PI / 2f64.ln()) - 1.0).abs() < 1e-10);
    let closed = radial_capacity(0.5, 1.0, 3.0, 3).unwrap();
    assert!((radial_capacity_quadrature(0.5, 1.0, 3.0, 3) / closed - 1.0).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mask_and_field_round_trip(a in 0.3..1.5f64, b in 0.3..1.5f64, n in 8usize..24, seed in seeds()) {
        let d = Arc::new(generate_domain(&DomainSpec::rectangle(a, b), 1.0 / n as f64).unwrap().with_label("r"));
        let back = parse_mask(&mask_to_string(&d)).unwrap();
        prop_assert_eq!(back.mask(), d.mask());
        prop_assert_eq!(back.shape(), d.shape());
        prop_assert_eq!(back.h().to_bits(), d.h().to_bits());
        prop_assert_eq!(back.origin(), d.origin());
        let u = field(&d, &seed);
        let v = parse_field(&field_to_string(&u)).unwrap();
        let bits = |f: &ScalarField| f.values().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&v), bits(&u));
    }

    #[test]
    fn quotient_is_scale_invariant(p in 1.1..8.0f64, c in prop_oneof![-50.0..-0.01, 0.01..50.0f64], seed in seeds()) {
        let u = field(&disc(1.0 / 8.0), &seed);
        let r = rayleigh_quotient(&u, p).unwrap().quotient;
        let rc = rayleigh_quotient(&u.scaled(c), p).unwrap().quotient;
        prop_assert!((rc / r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gradient_is_orthogonal_to_u(p in 1.1..8.0f64, seed in seeds()) {
        let u = field(&disc(1.0 / 8.0), &seed);
        let g = rayleigh_gradient(&u, p, 0.0).unwrap();
        let dot: f64 = g.values().iter().zip(u.values()).map(|(a, b)| a * b).sum();
        let scale: f64 = g.values().iter().map(|a| a.abs()).sum::<f64>() * u.values().iter().fold(0.0f64, |m, b| m.max(b.abs()));
        prop_assert!(dot.abs() <= 1e-10 * scale);
    }

    #[test]
    fn energy_is_midpoint_convex(p in 1.1..8.0f64, s in seeds(), t in seeds()) {
        let d = disc(1.0 / 8.0);
        let (u, v) = (field(&d, &s), field(&d, &t));
        let mid = ScalarField::new(d.clone(), u.values().iter().zip(v.values()).map(|(a, b)| 0.5 * (a + b)).collect()).unwrap();
        let e = |f: &ScalarField| rayleigh_quotient(f, p).unwrap().energy;
        prop_assert!(e(&mid) <= 0.5 * (e(&u) + e(&v)) * (1.0 + 1e-12));
    }

    #[test]
    fn weak_residual_is_linear_in_v(p in 1.1..6.0f64, lambda in 0.0..50.0f64, a in -3.0..3.0f64, s in seeds(), t in seeds(), w in seeds()) {
        let d = disc(1.0 / 8.0);
        let (u, v1, v2) = (field(&d, &s), field(&d, &t), field(&d, &w));
        let combo = ScalarField::new(d.clone(), v1.values().iter().zip(v2.values()).map(|(x, y)| a * x + y).collect()).unwrap();
        let r = |v: &ScalarField| weak_residual(&u, lambda, p, v).unwrap();
        let lhs = r(&combo);
        let rhs = a * r(&v1) + r(&v2);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + a.abs() * r(&v1).abs() + r(&v2).abs()));
    }

    #[test]
    fn rectangle_inradius_is_half_short_side(a in 0.3..2.0f64, b in 0.3..2.0f64, n in 8usize..40) {
        let d = generate_domain(&DomainSpec::rectangle(a, b), 1.0 / n as f64).unwrap();
        prop_assert!((inradius(&d) - 0.5 * a.min(b)).abs() <= inradius_error_bound(&d));
    }

    #[test]
    fn coverings_are_valid(a in 0.5..3.0f64, b in 0.3..1.0f64, n in 8usize..24) {
        for spec in [DomainSpec::rectangle(a, b), DomainSpec::ball(2, b), DomainSpec::punctured_ball(2, 1.0, 4)] {
            let d = generate_domain(&spec, 1.0 / n as f64).unwrap();
            let cover = hayman_cover(&d).unwrap();
            prop_assert!(check_covering(&d, &cover).is_ok());
            prop_assert!(cover.subset_count <= subset_budget(2));
        }
    }

    #[test]
    fn fractions_parse_as_quotients(n in 1u32..1000, m in 1u32..1000) {
        let v = parse_length(&format!("{n}/{m}")).unwrap();
        prop_assert_eq!(v, n as f64 / m as f64);
        prop_assert_eq!(parse_length(&format!(" {n} ")).unwrap(), n as f64);
    }

    #[test]
    fn trend_classes_match_synthetic_series(c in 0.5..5.0f64, rate in 0.5..2.0f64, beta in 0.75..2.0f64) {
        let h: Vec<f64> = (0..5).map(|k| 0.125 / 2f64.powi(k)).collect();
        let positive: Vec<f64> = h.iter().map(|x| c + rate * x.powf(beta)).collect();
        let t = classify_trend(&h, &positive).unwrap();
        prop_assert_eq!(t.class, TrendClass::Positive);
        prop_assert!(t.stable);
        let decaying: Vec<f64> = h.iter().map(|x| c * x.powf(0.5 * beta)).collect();
        let t = classify_trend(&h, &decaying).unwrap();
        prop_assert_eq!(t.class, TrendClass::Decaying);
        prop_assert!(t.stable);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn capacity_grows_with_the_inner_ball(a in 0.2..0.45f64, gap in 0.1..0.4f64, p in 1.5..4.0f64) {
        let cfg = SolverConfig::default();
        let cap = |r: f64| capacity(&CondenserProblem::concentric(2, r, 1.0, p, 1.0 / 16.0).unwrap(), &cfg).unwrap().value;
        prop_assert!(cap(a) <= cap(a + gap) * (1.0 + 1e-9));
    }
}
