use proptest::prelude::*;
use std::process::{Command, Output};
use swarm_eq::equilibria::EquilibriumKind;
use swarm_eq::model_core::InteractionParams;
use swarm_eq_cli::config::{InitKind, RunConfig};

fn swarm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swarm-eq")).args(args).output().expect("binary runs")
}

fn error_record(o: &Output) -> serde_json::Value {
    let err = String::from_utf8_lossy(&o.stderr);
    let line = err.lines().last().expect("stderr has an error line");
    serde_json::from_str(line).expect("error record is JSON")
}

fn tmp(tag: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("swarm-eq-cli-{tag}-{}", std::process::id()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn config_round_trips(
        a_s in 0.1f64..5.0, a_c in 0.0f64..5.0, b_s in 0.1f64..5.0, b_c in 0.0f64..5.0,
        m2 in 0.1f64..3.0, dm in 0.0f64..3.0, eta in 0.01f64..1.0,
        kind in 0usize..5, n in 2usize..5000, seed in any::<u64>(), t_end in 0.0f64..1e4,
        random in any::<bool>(), ratio in proptest::option::of(0.01f64..50.0),
        overlay in proptest::collection::vec(0.1f64..20.0, 0..6), grid in 1usize..400,
    ) {
        let mut cfg = RunConfig {
            params: InteractionParams::new(a_s, a_c, b_s, b_c, m2 + dm, m2).unwrap().with_eta(eta).unwrap(),
            kind: EquilibriumKind::ALL.get(kind).copied(),
            ..RunConfig::default()
        };
        cfg.sim.n = n;
        cfg.sim.seed = seed;
        cfg.sim.t_end = t_end;
        cfg.sim.init = if random { InitKind::RandomDisk } else { InitKind::Equilibrium };
        cfg.weak.ratio = ratio;
        cfg.weak.overlay_ratios = overlay;
        cfg.sweep.n = grid;
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.hash(), cfg.hash());
    }
}

#[test]
fn region_example_reports_triple_point() {
    let o = swarm(&["region", "-A", "1", "-B", "1", "-M", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["region"], "TriplePoint");
}

#[test]
fn stability_example_writes_artifacts() {
    let dir = tmp("stability");
    let o = swarm(&["stability", "-A", "3", "-B", "3.5", "-M", "2", "--kind", "target-light", "--out-dir", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "stable");
    for f in ["stability.csv", "stability.json", "config.json", "metadata.json"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
    // The written config reproduces the run.
    let cfg = RunConfig::load(&dir.join("config.json")).unwrap();
    assert_eq!(cfg.kind, Some(EquilibriumKind::TargetLightIn));
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["config_hash"], cfg.hash());
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn weakcross_single_ratio() {
    let o = swarm(&["weakcross", "--ratio", "6"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["d_over_R"].as_f64().unwrap() - 6f64.sqrt()).abs() < 1e-9);
}

#[test]
fn csv_goes_to_stdout_without_out_dir() {
    let o = swarm(&["lambda", "-A", "3", "-B", "3.5", "-M", "2", "--points", "5"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("r,lambda1,lambda2"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn invalid_parameters_exit_2() {
    let o = swarm(&["region", "-A", "-1", "-B", "1", "-M", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["exit_code"], 2);
}

#[test]
fn unknown_config_field_exit_2() {
    let path = tmp("bad-config.json");
    std::fs::write(&path, r#"{"sim": {"n": 10, "bogus": 1}}"#).unwrap();
    let o = swarm(&["region", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "ConfigInvalid");
    let _ = std::fs::remove_file(path);
}

#[test]
fn overlap_kind_has_no_spectrum() {
    let o = swarm(&["stability", "--kind", "overlap-light", "-A", "0.5", "-B", "1", "-M", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "UnsupportedKind");
}

#[test]
fn missing_equilibrium_exit_3() {
    let o = swarm(&["stability", "--kind", "target-light", "-A", "0.5", "-B", "4", "-M", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let rec = error_record(&o);
    assert_eq!(rec["error"], "EquilibriumMissing");
    assert_eq!(rec["exit_code"], 3);
}

#[test]
fn svg_needs_out_dir() {
    let o = swarm(&["lambda", "--svg"]);
    assert_eq!(o.status.code(), Some(2));
}
