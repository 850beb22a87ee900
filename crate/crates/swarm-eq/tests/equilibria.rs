use proptest::prelude::*;
use std::f64::consts::PI;
use swarm_eq::equilibria::*;
use swarm_eq::model_core::*;
use swarm_eq::Error;

fn example() -> InteractionParams {
    InteractionParams::new(1.0, 3.0, 1.0, 3.5, 2.0, 1.0).unwrap()
}

#[test]
fn light_target_radii() {
    let cfg = build_equilibrium(EquilibriumKind::TargetLightIn, &example()).unwrap();
    assert!(cfg.exists, "{}", cfg.reason);
    let r2: Vec<f64> = cfg.radii.iter().map(|r| r * r).collect();
    assert!((r2[0] - 1.0 / 8.0).abs() < 1e-15);
    assert!((r2[1] - 6.0 / 11.0).abs() < 1e-15);
    assert!((r2[2] - 10.0 / 11.0).abs() < 1e-15);
    assert!(!cfg.degenerate);
}

#[test]
fn degenerate_target_at_identical_coefficients() {
    let p = InteractionParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let cfg = build_equilibrium(EquilibriumKind::TargetLightIn, &p).unwrap();
    assert!((cfg.radii[0] - cfg.radii[1]).abs() < 1e-12);
    assert!(cfg.degenerate);
}

#[test]
fn overlap_outside_its_region_is_missing() {
    let p = InteractionParams::from_phase(0.5, 0.4, 2.0).unwrap();
    let cfg = build_equilibrium(EquilibriumKind::OverlapLightIn, &p).unwrap();
    assert!(!cfg.exists);
    assert!(matches!(velocity_residual(&cfg, &[0.1]), Err(Error::EquilibriumMissing(_))));
}

#[test]
fn residual_examples() {
    let cfg = build_equilibrium(EquilibriumKind::TargetLightIn, &example()).unwrap();
    let (r2, r1, r0) = (cfg.radii[0], cfg.radii[1], cfg.radii[2]);
    let res = velocity_residual(&cfg, &[0.2, 0.5 * (r1 + r0)]).unwrap();
    assert!(res.iter().all(|v| *v < 1e-10), "{res:?}");
    assert!(0.2 < r2);
    assert!(matches!(velocity_residual(&cfg, &[2.0 * r0]), Err(Error::SampleOutsideSupport(_))));
}

#[test]
fn kind_names_round_trip() {
    for k in EquilibriumKind::ALL {
        assert_eq!(k.name().parse::<EquilibriumKind>().unwrap(), k);
    }
    assert!("target".parse::<EquilibriumKind>().is_err());
}

fn region_union(kind: EquilibriumKind) -> &'static [RegionId] {
    use RegionId::*;
    match kind {
        EquilibriumKind::TargetLightIn => &[D3, D4, D5],
        EquilibriumKind::TargetHeavyIn => &[D2, D3, D4],
        EquilibriumKind::OverlapLightIn => &[D3, D6],
        EquilibriumKind::OverlapHeavyIn => &[D1, D4],
    }
}

fn interior_samples(cfg: &EquilibriumConfig, n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for sd in &cfg.subdomains {
        if sd.rho1 > 0.0 || sd.rho2 > 0.0 {
            for k in 0..n {
                let t = (k as f64 + 0.5) / n as f64;
                out.push(sd.r_in + t * (sd.r_out - sd.r_in));
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn existence_matches_region_table(a in 0.05f64..5.0, b in 0.05f64..5.0, m in 1.1f64..5.0) {
        let q = PhasePoint::new(a, b, m).unwrap();
        let region = classify_region(&q, 1e-6);
        prop_assume!(!region.is_boundary());
        let p = InteractionParams::from_phase(a, b, m).unwrap();
        for kind in EquilibriumKind::ALL {
            let cfg = build_equilibrium(kind, &p).unwrap();
            prop_assert_eq!(cfg.exists, region.in_any(region_union(kind)), "{:?} in {:?}", kind, region);
        }
    }

    #[test]
    fn residual_vanishes_on_support(a in 0.05f64..5.0, b in 0.05f64..5.0, m in 1.1f64..5.0, a_s in 0.3f64..3.0, b_s in 0.3f64..3.0) {
        let p = InteractionParams::new(a_s, a * a_s, b_s, b * b_s, m, 1.0).unwrap();
        for kind in EquilibriumKind::ALL {
            let cfg = build_equilibrium(kind, &p).unwrap();
            if cfg.exists {
                let res = velocity_residual(&cfg, &interior_samples(&cfg, 10)).unwrap();
                prop_assert!(res.iter().all(|v| *v < 1e-10), "{:?}: {:?}", kind, res);
            }
        }
    }

    #[test]
    fn mass_bookkeeping(a in 0.05f64..5.0, b in 0.05f64..5.0, m in 1.1f64..5.0, m2 in 0.2f64..3.0) {
        let p = InteractionParams::new(1.0, a, 1.0, b, m * m2, m2).unwrap();
        for kind in EquilibriumKind::ALL {
            let cfg = build_equilibrium(kind, &p).unwrap();
            if !cfg.exists {
                continue;
            }
            prop_assert!((cfg.mass(1) - p.m1()).abs() <= 1e-12 * p.m1());
            prop_assert!((cfg.mass(2) - p.m2()).abs() <= 1e-12 * p.m2());
            if kind == EquilibriumKind::TargetLightIn {
                let (r2, r1, r0) = (cfg.radii[0], cfg.radii[1], cfg.radii[2]);
                let d = equilibrium_densities(&p).unwrap();
                prop_assert!((d.only2.1 * PI * r2 * r2 - p.m2()).abs() <= 1e-12 * p.m2());
                prop_assert!((d.only1.0 * PI * (r0 * r0 - r1 * r1) - p.m1()).abs() <= 1e-12 * p.m1());
            }
        }
    }
}
