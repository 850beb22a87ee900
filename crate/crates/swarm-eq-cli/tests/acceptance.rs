//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line, even when it passes.
//!
//! `cargo test -p swarm-eq-cli --test acceptance -- 4 9` runs criteria 4 and 9 only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use swarm_eq::boundary_integrals::*;
use swarm_eq::equilibria::*;
use swarm_eq::linear_stability::*;
use swarm_eq::model_core::*;
use swarm_eq::particle_sim::*;
use swarm_eq::variational::*;
use swarm_eq::weak_cross::*;
use swarm_eq_cli::commands::overlay_point;
use swarm_eq_cli::config::RunConfig;

const LIGHT: EquilibriumKind = EquilibriumKind::TargetLightIn;
const HEAVY: EquilibriumKind = EquilibriumKind::TargetHeavyIn;

/// Outcome of one criterion: pass flag and a one-line summary of the evidence.
struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn existence_union(kind: EquilibriumKind) -> &'static [RegionId] {
    use RegionId::*;
    match kind {
        EquilibriumKind::TargetLightIn => &[D3, D4, D5],
        EquilibriumKind::TargetHeavyIn => &[D2, D3, D4],
        EquilibriumKind::OverlapLightIn => &[D3, D6],
        EquilibriumKind::OverlapHeavyIn => &[D1, D4],
    }
}

/// Cell centres of the `n x n` grid over `(0, 5)^2`.
fn grid_points(n: usize) -> impl Iterator<Item = (f64, f64)> {
    let c = move |k: usize| 5.0 * (k as f64 + 0.5) / n as f64;
    (0..n).flat_map(move |j| (0..n).map(move |i| (c(i), c(j))))
}

/// Physical parameters with random units whose phase point lies inside the
/// existence region of `kind`, at least `1e-6` away from the region curves.
fn draw_params(kind: EquilibriumKind, rng: &mut ChaCha8Rng) -> InteractionParams {
    loop {
        let (a, b, m) = (rng.random_range(0.05..5.0), rng.random_range(0.05..5.0), rng.random_range(1.1..5.0));
        let q = PhasePoint::new(a, b, m).unwrap();
        if !classify_region(&q, 1e-6).in_any(existence_union(kind)) {
            continue;
        }
        let (a_s, b_s, m2) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
        return InteractionParams::new(a_s, a * a_s, b_s, b * b_s, m * m2, m2).unwrap();
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

fn region_existence() -> Outcome {
    let mut mismatches = Vec::new();
    let mut checked = 0usize;
    for (a, b) in grid_points(200) {
        let q = PhasePoint::new(a, b, 2.0).unwrap();
        let reg = classify_region(&q, TAU_REGION);
        if reg.is_boundary() {
            continue;
        }
        let p = InteractionParams::from_phase(a, b, 2.0).unwrap();
        for kind in EquilibriumKind::ALL {
            checked += 1;
            let exists = build_equilibrium(kind, &p).unwrap().exists;
            if exists != reg.in_any(existence_union(kind)) {
                mismatches.push((kind.name(), a, b, reg.name()));
            }
        }
    }
    let first = mismatches.first().map(|m| format!(", first {m:?}")).unwrap_or_default();
    outcome(mismatches.is_empty(), format!("{} mismatches in {checked} constructor calls{first}", mismatches.len()))
}

fn velocity_residuals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for kind in EquilibriumKind::ALL {
        for _ in 0..50 {
            let p = draw_params(kind, &mut rng);
            let cfg = build_equilibrium(kind, &p).unwrap();
            assert!(cfg.exists, "{kind:?} {p:?}: {}", cfg.reason);
            let mut supp = cfg.support(1);
            supp.extend(cfg.support(2));
            let radii: Vec<f64> = (0..20)
                .map(|_| {
                    let (lo, hi) = supp[rng.random_range(0..supp.len())];
                    lo + (hi - lo) * rng.random_range(0.01..0.99)
                })
                .collect();
            for v in velocity_residual(&cfg, &radii).unwrap() {
                worst = worst.max(v);
            }
        }
    }
    outcome(worst < 1e-10, format!("max |v| / force scale = {worst:.3e} over 4 x 50 draws x 20 radii (need < 1e-10)"))
}

fn spectrum_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    let mut light_draws = 0;
    for draw in 0..200 {
        let kind = if draw % 2 == 0 { LIGHT } else { HEAVY };
        let p = draw_params(kind, &mut rng);
        for m in 1..=16 {
            let s = mode_spectrum(kind, &p, m).unwrap();
            // Each closed-form root must appear among the 6x6 eigenvalues.
            let floor = 1e-6 * s.q_norm;
            for z in &s.closed_form {
                let d = s.eigenvalues.iter().map(|e| (e - z).norm()).fold(f64::INFINITY, f64::min);
                worst = worst.max(d / z.norm().max(floor));
            }
        }
        if kind == LIGHT {
            light_draws += 1;
            let q = to_phase_point(&p);
            let unit = InteractionParams::from_phase(q.a, q.b, q.m).unwrap();
            let c = (q.m + q.b) / (1.0 + q.m * q.b);
            for m in 2..=16u32 {
                let cub = char_poly_cubic(LIGHT, &unit, m).unwrap();
                let r = (q.a / (q.m + q.a)).powi(m as i32);
                let p1 = (1.0 - 1.0 / c) * r;
                let pc = (1.0 - c) * (c / q.a).powi(m as i32 - 2) * (1.0 - r);
                worst_p = worst_p.max(rel(cub.p_of_mu(-1.0), p1)).max(rel(cub.p_of_mu(-1.0 / c), pc));
            }
        }
    }
    outcome(
        worst < 1e-8 && worst_p < 1e-12,
        format!("eigenvalue vs closed form {worst:.2e} (need < 1e-8); P(-1), P(-1/C) {worst_p:.2e} over {light_draws} light draws (need < 1e-12)"),
    )
}

fn stability_diagram() -> Outcome {
    let mut light_bad = 0;
    let mut heavy_bad = 0;
    let mut mode2_bad = 0;
    let mut nest_bad = 0;
    let mut marginal = 0;
    let mut counted = [0usize; 3];
    for (a, b) in grid_points(200) {
        let q = PhasePoint::new(a, b, 2.0).unwrap();
        for k in 1..4 {
            if region_um(k + 1, &q) && !region_um(k, &q) {
                nest_bad += 1;
            }
        }
        let reg = classify_region(&q, TAU_REGION);
        if reg.is_boundary() {
            continue;
        }
        let p = InteractionParams::from_phase(a, b, 2.0).unwrap();
        if reg.in_any(existence_union(LIGHT)) {
            let r = stability_report(LIGHT, &p, 32).unwrap();
            // The computed spectra must nest the same way.
            for k in 1..4 {
                if r.modes[k].verdict == Verdict::Unstable && r.modes[k - 1].verdict != Verdict::Unstable {
                    nest_bad += 1;
                }
            }
            if r.overall == Verdict::Marginal {
                marginal += 1;
            } else {
                counted[0] += 1;
                let expect_stable = reg.in_any(&[RegionId::D4, RegionId::D5]);
                light_bad += ((r.overall == Verdict::Stable) != expect_stable) as usize;
            }
        }
        if reg.in_any(existence_union(HEAVY)) {
            let r = stability_report(HEAVY, &p, 32).unwrap();
            counted[1] += 1;
            heavy_bad += (r.overall != Verdict::Unstable) as usize;
            let v2 = r.modes[1].verdict;
            if v2 == Verdict::Marginal || (b - 1.0).abs() < 1e-9 {
                marginal += 1;
            } else {
                counted[2] += 1;
                mode2_bad += ((v2 == Verdict::Unstable) != (b > 1.0)) as usize;
            }
        }
    }
    outcome(
        light_bad + heavy_bad + mode2_bad + nest_bad == 0,
        format!(
            "light verdict mismatches {light_bad}/{}, heavy not unstable {heavy_bad}/{}, heavy m=2 vs B>1 mismatches {mode2_bad}/{}, nesting violations {nest_bad}, marginal excluded {marginal}",
            counted[0], counted[1], counted[2]
        ),
    )
}

fn variational_boundary() -> Outcome {
    let (a, m) = (3.0, 2.0);
    let gap = |b: f64| {
        let p = InteractionParams::from_phase(a, b, m).unwrap();
        lambda_m_target_closed_form(&p) - lambda2_target_closed_form(&p)
    };
    // Scan for sign changes, then bisect the one found.
    let bs: Vec<f64> = (0..=600).map(|k| 0.1 + 2.9 * k as f64 / 600.0).collect();
    let changes: Vec<(f64, f64)> = bs.windows(2).filter(|w| gap(w[0]).signum() != gap(w[1]).signum()).map(|w| (w[0], w[1])).collect();
    let f = f_of_a(a, m);
    let b_star = (m * f - 1.0) / (m - f);
    let mut root_err = f64::INFINITY;
    if let [(mut lo, mut hi)] = changes[..] {
        let s_lo = gap(lo).signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid).signum() == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        root_err = (0.5 * (lo + hi) - b_star).abs();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut configs = 0;
    let points = [(3.0, 3.5), (3.0, 0.75), (2.0, 1.8), (0.5, 1.0), (4.0, 0.5), (0.8, 3.0)];
    for kind in EquilibriumKind::ALL {
        for &(pa, pb) in &points {
            let p = InteractionParams::from_phase(pa, pb, 2.0).unwrap();
            let cfg = build_equilibrium(kind, &p).unwrap();
            if !cfg.exists {
                continue;
            }
            configs += 1;
            let prof = [lambda_profile(&cfg, 1).unwrap(), lambda_profile(&cfg, 2).unwrap()];
            for _ in 0..20 {
                let r = rng.random_range(0.0..3.0 * cfg.outer_radius());
                for sp in [1, 2] {
                    let o = lambda_quadrature_oracle(&cfg, sp, r).unwrap();
                    let v = prof[sp - 1].value(r);
                    worst = worst.max((o - v).abs() / v.abs().max(1.0));
                }
            }
        }
    }
    outcome(
        changes.len() == 1 && root_err < 1e-6 && worst < 1e-6,
        format!(
            "{} sign change(s), |B_root - B*| = {root_err:.2e} with B* = {b_star:.9} (need < 1e-6); profile vs oracle {worst:.2e} over {configs} configurations x 20 radii (need < 1e-6)",
            changes.len()
        ),
    )
}

fn second_variation_checks() -> Outcome {
    let grid = Grid { n: 14, half_width: 1.5 };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_ii: f64 = 0.0;
    let mut min_e2 = f64::INFINITY;
    let mut convex = 0;
    for _ in 0..100 {
        let mut u1: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut u2: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        project_admissible(&grid, &mut u1, &mut u2);
        let norm = (u1.iter().chain(&u2).map(|v| v * v).sum::<f64>() * grid.h() * grid.h()).sqrt();
        u1.iter_mut().chain(u2.iter_mut()).for_each(|v| *v /= norm);
        let p = InteractionParams::new(
            rng.random_range(0.5..2.0),
            rng.random_range(0.1..2.0),
            rng.random_range(0.5..2.0),
            rng.random_range(0.1..3.0),
            2.0,
            1.0,
        )
        .unwrap();
        let sv = second_variation(&grid, &p, &u1, &u2).unwrap();
        let reduced = quadratic_part_reduced(&p, sv.moment1);
        worst_ii = worst_ii.max((sv.term_ii - reduced).abs() / reduced.abs().max(1e-300));
        if p.a_s() > p.a_c() && p.b_c() > p.b_s() {
            convex += 1;
            min_e2 = min_e2.min(sv.total);
        }
    }
    outcome(
        worst_ii < 1e-8 && min_e2 >= -1e-8,
        format!("II identity {worst_ii:.2e} (need < 1e-8); min E2 = {min_e2:.3e} over {convex} draws with a_s > a_c, b_c > b_s (need >= -1e-8)"),
    )
}

fn log_kernel(alpha: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| ((1.0 - alpha).powi(2) + 4.0 * alpha * (0.5 * t).sin().powi(2)).ln()
}

fn rational_kernel(alpha: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| 1.0 / ((1.0 - alpha).powi(2) + 4.0 * alpha * (0.5 * t).sin().powi(2))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn boundary_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut exact: f64 = 0.0;
    let mut second_order_bad = 0;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..40 {
        let alpha = rng.random_range(0.2..3.0);
        let mu = rng.random_range(1..7) * if rng.random::<bool>() { 1 } else { -1 };
        let t0 = rng.random_range(0.0..std::f64::consts::TAU);
        let v = log_contour_integral(alpha, mu, t0).unwrap();
        exact = exact.max((v - contour_quadrature(log_kernel(alpha), mu, t0).unwrap()).norm());
        if (alpha - 1.0).abs() > 0.05 {
            let v = rational_contour_integral(alpha, mu, t0).unwrap();
            let o = contour_quadrature(rational_kernel(alpha), mu, t0).unwrap();
            exact = exact.max((v - o).norm() / v.norm().max(1.0));
        }

        // First-order boundary formulas: exact at eps = 0, error O(eps^2) beyond.
        let m = rng.random_range(1..6);
        let rj = rng.random_range(0.5..2.0);
        let same = rng.random::<bool>();
        let rl = if same { rj } else { rj * [0.5, 0.8, 1.3, 1.6][rng.random_range(0..4)] };
        let dir: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let x = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let rep = |eps: f64| {
            let on = PerturbedDisk { radius: rj, m, eps_n: eps * dir[0], eps_t: eps * dir[1] };
            let om = if same { on } else { PerturbedDisk { radius: rl, m, eps_n: eps * dir[2], eps_t: eps * dir[3] } };
            dist(repulsion_integral(&on, t0, &om), repulsion_oracle(&on, t0, &om).unwrap())
        };
        let att = |eps: f64| {
            let d = PerturbedDisk { radius: rj, m, eps_n: eps * dir[0], eps_t: eps * dir[1] };
            dist(attraction_integral(x, &d), attraction_oracle(x, &d).unwrap())
        };
        for e in [&rep as &dyn Fn(f64) -> f64, &att] {
            exact = exact.max(e(0.0));
            let c = e(1e-2) / 1e-4;
            let e3 = e(1e-3);
            if e3 > 2.0 * c * 1e-6 + 1e-8 {
                second_order_bad += 1;
            }
            if c > 0.0 {
                worst_ratio = worst_ratio.max(e3 / (c * 1e-6));
            }
        }
    }
    outcome(
        exact < 1e-8 && second_order_bad == 0,
        format!("closed form vs quadrature at eps = 0: {exact:.2e} (need < 1e-8); O(eps^2) violations {second_order_bad}, worst e(1e-3) / (C 1e-6) = {worst_ratio:.3}"),
    )
}

fn particles(kind: EquilibriumKind, a: f64, b: f64, seed: u64) -> (ParticleState, RunDiagnostics, EquilibriumConfig) {
    let p = InteractionParams::from_phase(a, b, 2.0).unwrap();
    let cfg = build_equilibrium(kind, &p).unwrap();
    let (n1, n2) = split_counts(200, &p);
    let s0 = init_from_equilibrium(&cfg, n1, n2, seed).unwrap();
    let ctl = RunControls { diag_every: 1.0, snapshot_every: Some(5.0), ..RunControls::default() };
    let (s, d) = run(&s0, 50.0, &ctl).unwrap();
    (s, d, cfg)
}

fn particle_reproduction() -> Outcome {
    let (s_a, d_a, cfg) = particles(LIGHT, 3.0, 3.5, 1);
    let morph = morphology(&s_a).unwrap();
    let (_, disk) = moment_radii(&s_a, 2, false);
    let (gap, outer) = moment_radii(&s_a, 1, true);
    let radius_err = [rel(disk, cfg.radii[0]), rel(gap, cfg.radii[1]), rel(outer, cfg.radii[2])].into_iter().fold(0.0, f64::max);
    let pass_a = morph.label == MorphologyLabel::TargetLike && radius_err < 0.05;

    let (s_b, d_b, _) = particles(LIGHT, 3.0, 2.0, 1);
    let offset = inner_core_offset(&s_b, LIGHT);
    let pass_b = offset > 0.1;

    let (s_c, d_c, _) = particles(HEAVY, 3.0, 3.5, 1);
    let aniso = inner_core_anisotropy(&s_c, HEAVY);
    let pass_c = aniso > 1.5;

    let mut d_worst_rise: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for d in [&d_a, &d_b, &d_c] {
        d_worst_rise = d_worst_rise.max(d.max_energy_increase / d.initial_energy.abs().max(1.0));
        drift = drift.max(d.com_drift_rate());
    }
    let pass_d = d_worst_rise <= 1e-12 && drift < 1e-8;
    outcome(
        pass_a && pass_b && pass_c && pass_d,
        format!(
            "(a) {} with radius error {:.2}% [{}]; (b) inner offset {offset:.3} R [{}]; (c) anisotropy {aniso:.2} [{}]; (d) max relative energy rise {d_worst_rise:.1e}, com drift {drift:.1e}/time [{}]",
            morph.label.name(),
            100.0 * radius_err,
            if pass_a { "ok" } else { "fail" },
            if pass_b { "ok" } else { "fail" },
            if pass_c { "ok" } else { "fail" },
            if pass_d { "ok" } else { "fail" },
        ),
    )
}

fn weak_cross_curve() -> Outcome {
    let e6 = (d_of_ab_ratio(6.0).unwrap().d_over_r - 6f64.sqrt()).abs();
    let e4 = (d_of_ab_ratio(4.0).unwrap().d_over_r - 2.0).abs();
    let mixed = [0.1, 0.5, 0.9, 1.0].iter().all(|&r| d_of_ab_ratio(r).unwrap().d_over_r == 0.0);
    let (s, i) = ab_ratio_branches(1.0).unwrap();
    let seam1 = (s - i).abs();
    let seam2 = (d_of_ab_ratio(4.0 - 1e-10).unwrap().d_over_r - d_of_ab_ratio(4.0 + 1e-10).unwrap().d_over_r).abs();
    let closed = e6 < 1e-9 && e4 < 1e-9 && mixed && seam1 < 1e-8 && seam2 < 1e-8;

    let mut cfg = RunConfig::default();
    cfg.sim.seed = 11;
    let ratios = [0.5, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0];
    let mut worst_curve: f64 = 0.0;
    let mut worst_pair: f64 = 0.0;
    let mut rows = Vec::new();
    for &r in &ratios {
        let c = d_of_ab_ratio(r).unwrap().d_over_r;
        let d1 = overlay_point(&cfg, r, 1.0).unwrap();
        let d2 = overlay_point(&cfg, r, 2.0).unwrap();
        // Relative to the curve, with an absolute floor of one radius near d = 0.
        let scale = c.max(1.0);
        worst_curve = worst_curve.max((d1 - c).abs() / scale).max((d2 - c).abs() / scale);
        worst_pair = worst_pair.max((d1 - d2).abs() / d1.max(d2).max(1.0));
        rows.push(format!("{r}:{d1:.3}/{d2:.3}/{c:.3}"));
    }
    let overlay = worst_curve <= 0.1 && worst_pair <= 0.05;
    outcome(
        closed && overlay,
        format!(
            "d(6) err {e6:.1e}, d(4) err {e4:.1e}, d(<=1) = 0 [{mixed}], seams {seam1:.1e}/{seam2:.1e}; overlay vs curve {:.1}% (need <= 10%), M=1 vs M=2 {:.1}% (need <= 5%); ratio:M1/M2/curve {}",
            100.0 * worst_curve,
            100.0 * worst_pair,
            rows.join(" ")
        ),
    )
}

fn cli(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_swarm-eq"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env("SWARM_EQ_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn determinism() -> Outcome {
    let base = std::env::temp_dir().join(format!("swarm-eq-acceptance-{}", std::process::id()));
    let runs: [(&str, &[&str], &[&str]); 5] = [
        ("simulate", &["simulate", "-A", "3", "-B", "2", "-M", "2", "-N", "120", "--t-end", "5", "--seed", "17"], &["snapshots.csv", "diagnostics.csv"]),
        ("random", &["simulate", "--init", "random-disk", "--eta", "0.05", "-N", "60", "--t-end", "5", "--seed", "4"], &["snapshots.csv", "diagnostics.csv"]),
        ("stability", &["stability", "-A", "3", "-B", "0.75", "-M", "2", "--kind", "target-heavy"], &["stability.csv"]),
        ("lambda", &["lambda", "-A", "3", "-B", "3.5", "-M", "2"], &["lambda.csv"]),
        ("phase", &["phase-diagram", "-M", "2", "--grid", "30"], &["phase_diagram.csv"]),
    ];
    let mut compared = 0;
    let mut differ = Vec::new();
    for (tag, args, files) in runs {
        let (d1, d2) = (base.join(format!("{tag}-1")), base.join(format!("{tag}-2")));
        for d in [&d1, &d2] {
            let o = cli(args, d);
            if !o.status.success() {
                return outcome(false, format!("{tag} failed: {}", String::from_utf8_lossy(&o.stderr)));
            }
        }
        for f in files {
            let (x, y) = (std::fs::read(d1.join(f)).unwrap(), std::fs::read(d2.join(f)).unwrap());
            compared += 1;
            if x != y || x.is_empty() {
                differ.push(format!("{tag}/{f}"));
            }
        }
    }
    // A different seed must change the particle output.
    let other = base.join("simulate-seed");
    cli(&["simulate", "-A", "3", "-B", "2", "-M", "2", "-N", "120", "--t-end", "5", "--seed", "18"], &other);
    let seed_matters = std::fs::read(other.join("snapshots.csv")).ok() != std::fs::read(base.join("simulate-1/snapshots.csv")).ok();
    let _ = std::fs::remove_dir_all(&base);
    outcome(
        differ.is_empty() && seed_matters,
        format!("{compared} CSV pairs compared, {} differ {:?}; changing the seed changes the output [{seed_matters}]", differ.len(), differ),
    )
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(u32, &str, u64, Check); 10] = [
        (1, "region/existence concordance", 10, region_existence),
        (2, "equilibrium velocity residual", 5, velocity_residuals),
        (3, "spectrum vs closed form", 10, spectrum_identity),
        (4, "stability phase diagram", 60, stability_diagram),
        (5, "variational boundary", 30, variational_boundary),
        (6, "second variation", 60, second_variation_checks),
        (7, "boundary integral oracles", 30, boundary_oracles),
        (8, "particle reproduction", 600, particle_reproduction),
        (9, "weak-cross curve and overlay", 1200, weak_cross_curve),
        (10, "CLI determinism", 120, determinism),
    ];
    // Positional arguments select criteria by number; flags from the test runner are ignored.
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, limit, check) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let o = check();
        let el = t.elapsed();
        let in_time = el <= Duration::from_secs(limit);
        let pass = o.pass && in_time;
        failed += !pass as usize;
        println!(
            "{} criterion {id:>2} {name}: {} ({:.1} s, limit {limit} s{})",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            el.as_secs_f64(),
            if in_time { "" } else { ", over time" }
        );
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
