use proptest::prelude::*;
use std::f64::consts::PI;
use swarm_eq::model_core::{coexist_pair, InteractionParams};
use swarm_eq::weak_cross::*;
use swarm_eq::Error;

fn weak(ratio: f64, eta: f64) -> InteractionParams {
    InteractionParams::new(1.0, ratio, 1.0, 1.0, 2.0, 1.0).unwrap().with_eta(eta).unwrap()
}

#[test]
fn branch_endpoints() {
    assert!((ab_ratio_of_d(1e-7).unwrap() - 1.0).abs() < 1e-6);
    assert!((ab_ratio_of_d(2.0).unwrap() - 4.0).abs() < 1e-14);
    assert_eq!(log_cos_integral(2.0).unwrap(), 0.0);
    assert!(matches!(ab_ratio_of_d(0.0), Err(Error::OutOfRange(_))));
    assert!(matches!(ab_ratio_of_d(2.5), Err(Error::OutOfRange(_))));
}

#[test]
fn seams_are_continuous() {
    let (s, i) = ab_ratio_branches(1.0).unwrap();
    assert!((s - i).abs() < 1e-8, "{s} vs {i}");
    let below = d_of_ab_ratio(4.0 - 1e-10).unwrap().d_over_r;
    let above = d_of_ab_ratio(4.0 + 1e-10).unwrap().d_over_r;
    assert!((below - 2.0).abs() < 1e-8 && (above - 2.0).abs() < 1e-8);
    let near_one = d_of_ab_ratio(1.0 + 1e-12).unwrap().d_over_r;
    assert!(near_one < 1e-4);
}

#[test]
fn closed_form_regimes() {
    let s = d_of_ab_ratio(6.0).unwrap();
    assert!((s.d_over_r - 6f64.sqrt()).abs() < 1e-9);
    assert!((s.d_over_r - 2.4495).abs() < 1e-4);
    assert_eq!(s.regime, Regime::Separated);
    let s = d_of_ab_ratio(4.0).unwrap();
    assert!((s.d_over_r - 2.0).abs() < 1e-9);
    let s = d_of_ab_ratio(0.5).unwrap();
    assert_eq!((s.d_over_r, s.regime), (0.0, Regime::FullMix));
    let s = d_of_ab_ratio(1.0).unwrap();
    assert_eq!((s.d_over_r, s.regime), (0.0, Regime::MixThreshold));
    assert!(d_of_ab_ratio(0.0).is_err() && d_of_ab_ratio(f64::NAN).is_err());
}

#[test]
fn root_found_regimes() {
    for r in [1.1, 1.5, 1.705, 2.0, 3.0, 3.99] {
        let s = d_of_ab_ratio(r).unwrap();
        assert!(s.residual < 1e-10, "ratio {r}: residual {}", s.residual);
        assert_eq!(s.regime, if s.d_over_r <= 1.0 { Regime::Small } else { Regime::Intermediate });
    }
}

#[test]
fn curve_is_monotone() {
    let c = curve_sample(0.5, 8.0, 50).unwrap();
    assert_eq!(c.len(), 50);
    assert!(c.windows(2).all(|w| w[1].d_over_r >= w[0].d_over_r));
    assert_eq!(c[0].d_over_r, 0.0);
    assert!((c[49].d_over_r - 8f64.sqrt()).abs() < 1e-12);
    assert!(curve_sample(2.0, 1.0, 10).is_err());
}

#[test]
fn leading_order_examples() {
    let lo = leading_order_densities(&weak(1.0, 0.05));
    assert!((lo.rho[0] - 2.0 / PI).abs() < 1e-15 && (lo.radius - 1.0).abs() < 1e-15);
    assert!(lo.warning.is_none());
    let p = InteractionParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap().with_eta(0.05).unwrap();
    let lo = leading_order_densities(&p);
    assert_eq!(lo.rho[0], lo.rho[1]);
    assert!(leading_order_densities(&weak(1.0, 0.5)).warning.is_some());
}

#[test]
fn leading_order_deviation_is_first_order() {
    for eta in [0.05, 0.02, 0.01] {
        let p = weak(1.0, eta);
        let lo = leading_order_densities(&p);
        let (r1, r2) = coexist_pair(&p).unwrap();
        assert!((r1 - lo.rho[0]).abs() <= 0.2 * eta * lo.rho[0], "eta {eta}");
        assert!((r2 - lo.rho[1]).abs() <= 0.2 * eta * lo.rho[1].max(lo.rho[0]), "eta {eta}");
    }
}

#[test]
fn force_balance_vanishes_at_solved_separation() {
    for k in 0..20 {
        let ratio = 1.0 + 3.0 * (k as f64 + 0.5) / 20.0;
        let d = d_of_ab_ratio(ratio).unwrap().d_over_r;
        let p = weak(ratio, 0.05);
        let scale = force_scale(&p, d);
        let oracle = force_balance_oracle(&p, d).unwrap();
        assert!(oracle.abs() < 1e-6 * scale, "ratio {ratio}: oracle {oracle}");
        assert!(force_balance(&p, d).unwrap().abs() < 1e-9 * scale);
    }
}

#[test]
fn force_balance_separated_closed_form() {
    let p = weak(6.0, 0.05);
    let d = 6f64.sqrt();
    assert!(force_balance(&p, d).unwrap().abs() < 1e-12 * force_scale(&p, d));
    assert!(force_balance_oracle(&p, d).unwrap().abs() < 1e-6 * force_scale(&p, d));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn force_form_matches_ratio_form(d in 0.02f64..1.99, r in 0.5f64..2.0) {
        // Choose A/B so that the ratio form is satisfied at d; the force form must vanish.
        let ratio = ab_ratio_of_d(d).unwrap();
        let p = InteractionParams::new(r * r, ratio * r, r, 1.0, 1.5, 1.0).unwrap().with_eta(0.05).unwrap();
        let dd = d * p.self_radius();
        prop_assert!(force_balance(&p, dd).unwrap().abs() <= 1e-9 * force_scale(&p, dd));
        prop_assert!((force_balance(&p, dd).unwrap() - force_balance_oracle(&p, dd).unwrap()).abs() <= 1e-8 * force_scale(&p, dd));
    }

    #[test]
    fn inversion_round_trip(d in 0.01f64..2.0) {
        let ratio = ab_ratio_of_d(d).unwrap();
        let s = d_of_ab_ratio(ratio).unwrap();
        prop_assert!((s.d_over_r - d).abs() < 1e-9);
    }

    #[test]
    fn solution_does_not_depend_on_mass_ratio(ratio in 0.2f64..8.0, m in 1.0f64..10.0) {
        // The solver only sees A/B; the leading-order radius only sees a_s, b_s.
        let p = InteractionParams::new(1.0, ratio, 1.0, 1.0, m, 1.0).unwrap().with_eta(0.05).unwrap();
        prop_assert_eq!(leading_order_densities(&p).radius, 1.0);
        prop_assert!(d_of_ab_ratio(ratio).is_ok());
    }
}
