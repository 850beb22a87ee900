use rayon::prelude::*;
use serde_json::{json, Value};
use swarm_eq::equilibria::{build_equilibrium, EquilibriumKind};
use swarm_eq::linear_stability::{stability_report, um_curve, Verdict};
use swarm_eq::model_core::{c1, c2, classify_region, to_phase_point, InteractionParams, RegionId, TAU_REGION};
use swarm_eq::particle_sim::{
    init_from_equilibrium, init_random_disk, inner_core_anisotropy, inner_core_offset, morphology, run, split_counts,
    ParticleState, RunControls, RunDiagnostics,
};
use swarm_eq::variational::{lambda_profile, minimizer_verdict};
use swarm_eq::weak_cross::{curve_sample, d_of_ab_ratio};
use swarm_eq::Error;

use crate::config::{InitKind, RunConfig};
use crate::emit::{num, Output, Table};
use crate::svg::Plot;
use crate::CliError;

const BLUE: &str = "#1f77b4";
const ORANGE: &str = "#ff7f0e";
const GREY: &str = "#555555";

fn kind_or(cfg: &RunConfig, k: EquilibriumKind) -> EquilibriumKind {
    cfg.kind.unwrap_or(k)
}

fn phase_json(p: &InteractionParams) -> Value {
    let q = to_phase_point(p);
    json!({ "A": q.a, "B": q.b, "M": q.m })
}

pub fn region(cfg: &RunConfig) -> Result<Output, CliError> {
    let q = to_phase_point(&cfg.params);
    let r = classify_region(&q, TAU_REGION);
    Ok(Output::summary(json!({
        "region": r.name(),
        "boundary": r.is_boundary(),
        "A": q.a, "B": q.b, "M": q.m,
        "c1": q.c1(), "c2": q.c2(),
    })))
}

pub fn equilibrium(cfg: &RunConfig) -> Result<Output, CliError> {
    let kinds = cfg.kind.map(|k| vec![k]).unwrap_or_else(|| EquilibriumKind::ALL.to_vec());
    let mut list = Vec::new();
    for k in kinds {
        let eq = build_equilibrium(k, &cfg.params)?;
        let mut v = serde_json::to_value(&eq).expect("serializable");
        v["kind"] = json!(k.name());
        v["minimizer"] = if eq.exists { serde_json::to_value(minimizer_verdict(&eq)?).expect("serializable") } else { Value::Null };
        list.push(v);
    }
    let region = classify_region(&to_phase_point(&cfg.params), TAU_REGION).name();
    let summary = json!({ "phase": phase_json(&cfg.params), "region": region, "equilibria": list });
    let mut out = Output::summary(summary.clone());
    out.file("equilibrium.json", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(out)
}

pub fn lambda(cfg: &RunConfig) -> Result<Output, CliError> {
    let kind = kind_or(cfg, EquilibriumKind::TargetLightIn);
    let eq = build_equilibrium(kind, &cfg.params)?;
    if !eq.exists {
        return Err(Error::EquilibriumMissing(eq.reason).into());
    }
    let prof = [lambda_profile(&eq, 1)?, lambda_profile(&eq, 2)?];
    let r_max = cfg.lambda.r_max.unwrap_or(3.0 * eq.outer_radius());
    let n = cfg.lambda.points;
    let rs: Vec<f64> = (0..n).map(|k| r_max * k as f64 / (n - 1) as f64).collect();
    let vals: Vec<[f64; 2]> = rs.iter().map(|&r| [prof[0].value(r), prof[1].value(r)]).collect();
    let mut t = Table::new(&["r", "lambda1", "lambda2"]);
    for (r, v) in rs.iter().zip(&vals) {
        t.row([num(*r), num(v[0]), num(v[1])]);
    }
    let verdict = minimizer_verdict(&eq)?;
    let mut out = Output::summary(json!({
        "kind": kind.name(),
        "phase": phase_json(&cfg.params),
        "radii": eq.radii,
        "plateau": [prof[0].plateau, prof[1].plateau],
        "minimizer": verdict,
    }));
    out.primary = Some(("lambda.csv".into(), t.finish()));
    if cfg.output.svg {
        let pts = |s: usize| rs.iter().zip(&vals).map(|(r, v)| (*r, v[s] - prof[s].plateau)).collect::<Vec<_>>();
        let (p1, p2) = (pts(0), pts(1));
        let (_, yr) = Plot::bounds(p1.iter().chain(&p2).copied());
        let mut plot = Plot::new((0.0, r_max), yr, &format!("Lambda profiles, {}", kind.name()), "r", "Lambda_i - lambda_i");
        plot.line(&[(0.0, 0.0), (r_max, 0.0)], GREY, None);
        for &r in &eq.radii {
            plot.line(&[(r, yr.0), (r, yr.1)], "#bbbbbb", None);
        }
        plot.line(&p1, BLUE, Some("species 1"));
        plot.line(&p2, ORANGE, Some("species 2"));
        out.file("lambda.svg", plot.render());
    }
    Ok(out)
}

pub fn stability(cfg: &RunConfig) -> Result<Output, CliError> {
    let kind = kind_or(cfg, EquilibriumKind::TargetLightIn);
    let rep = stability_report(kind, &cfg.params, cfg.m_max)?;
    let mut t = Table::new(&["m", "set", "index", "re", "im"]);
    for s in &rep.modes {
        for (set, zs) in [("full", &s.eigenvalues), ("nontrivial", &s.nontrivial), ("closed-form", &s.closed_form)] {
            for (i, z) in zs.iter().enumerate() {
                t.row([s.m.to_string(), set.to_string(), i.to_string(), num(z.re), num(z.im)]);
            }
        }
    }
    let modes: Vec<Value> = rep
        .modes
        .iter()
        .map(|s| json!({ "m": s.m, "verdict": s.verdict.name(), "max_real": s.max_real(), "closed_form_discrepancy": s.closed_form_discrepancy }))
        .collect();
    let summary = json!({
        "kind": kind.name(),
        "phase": phase_json(&cfg.params),
        "m_max": rep.m_max,
        "verdict": rep.overall.name(),
        "dominant_unstable_mode": rep.dominant_unstable_mode,
        "higher_modes_covered": rep.higher_modes_covered,
        "modes": modes,
    });
    let mut out = Output::summary(summary.clone());
    out.file("stability.csv", t.finish());
    out.file("stability.json", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(out)
}

fn snapshot_table(d: &RunDiagnostics, last: &ParticleState) -> String {
    let mut t = Table::new(&["t", "species", "particle_id", "x", "y"]);
    let mut emit = |time: f64, pos1: &[[f64; 2]], pos2: &[[f64; 2]]| {
        for (sp, pts) in [(1, pos1), (2, pos2)] {
            for (i, x) in pts.iter().enumerate() {
                t.row([num(time), sp.to_string(), i.to_string(), num(x[0]), num(x[1])]);
            }
        }
    };
    if d.snapshots.is_empty() {
        emit(last.t, &last.pos1, &last.pos2);
    }
    for s in &d.snapshots {
        emit(s.t, &s.pos1, &s.pos2);
    }
    t.finish()
}

fn diagnostics_table(d: &RunDiagnostics) -> String {
    let mut t = Table::new(&["t", "E", "com_x", "com_y", "d_over_R", "max_speed"]);
    for s in &d.samples {
        t.row([num(s.t), num(s.energy), num(s.com_total[0]), num(s.com_total[1]), num(s.d_over_r), num(s.max_speed)]);
    }
    t.finish()
}

fn scatter(s: &ParticleState, title: &str) -> String {
    let all = s.pos1.iter().chain(&s.pos2).map(|x| (x[0], x[1]));
    let (xr, yr) = Plot::bounds(all);
    // Equal aspect: widen the narrower axis.
    let half = 0.5 * (xr.1 - xr.0).max(yr.1 - yr.0) * 4.0 / 3.0;
    let (cx, cy) = (0.5 * (xr.0 + xr.1), 0.5 * (yr.0 + yr.1));
    let mut plot = Plot::new((cx - half, cx + half), (cy - 0.75 * half, cy + 0.75 * half), title, "x", "y");
    let pts = |v: &[[f64; 2]]| v.iter().map(|x| (x[0], x[1])).collect::<Vec<_>>();
    plot.dots(&pts(&s.pos1), BLUE, 2.0, Some("species 1"));
    plot.dots(&pts(&s.pos2), ORANGE, 2.0, Some("species 2"));
    plot.render()
}

pub fn simulate(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.params;
    let sim = &cfg.sim;
    let (d1, d2) = split_counts(sim.n, &p);
    let (n1, n2) = (sim.n1.unwrap_or(d1), sim.n2.unwrap_or(d2));
    let kind = kind_or(cfg, EquilibriumKind::TargetLightIn);
    let s0 = match sim.init {
        InitKind::Equilibrium => init_from_equilibrium(&build_equilibrium(kind, &p)?, n1, n2, sim.seed)?,
        InitKind::RandomDisk => init_random_disk(n1, n2, sim.init_radius, sim.seed, &p)?,
    };
    let (s, d) = run(&s0, sim.t_end, &sim.controls)?;
    let morph = match morphology(&s) {
        Ok(m) => serde_json::to_value(m).expect("serializable"),
        Err(Error::TooFewParticles(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let mut summary = json!({
        "phase": phase_json(&p),
        "n1": n1, "n2": n2, "seed": sim.seed, "t_end": s.t,
        "morphology": morph,
        "steps": d.steps, "rejected": d.rejected,
        "com_drift_rate": d.com_drift_rate(),
        "max_energy_increase": d.max_energy_increase,
        "initial_energy": d.initial_energy,
        "final_energy": d.samples.last().map(|x| x.energy),
    });
    if sim.init == InitKind::Equilibrium && kind.is_target() {
        summary["kind"] = json!(kind.name());
        summary["inner_core_offset"] = json!(inner_core_offset(&s, kind));
        summary["inner_core_anisotropy"] = json!(inner_core_anisotropy(&s, kind));
    }
    let mut out = Output::summary(summary.clone());
    out.file("snapshots.csv", snapshot_table(&d, &s));
    out.file("diagnostics.csv", diagnostics_table(&d));
    out.file("morphology.json", serde_json::to_string_pretty(&summary).expect("json"));
    if cfg.output.svg {
        out.file("snapshot.svg", scatter(&s, &format!("t = {}", num(s.t))));
    }
    Ok(out)
}

/// Particle estimate of `d/R` for one ratio and mass, from a random disk.
pub fn overlay_point(cfg: &RunConfig, ratio: f64, m1: f64) -> Result<f64, CliError> {
    let w = &cfg.weak;
    let p = InteractionParams::new(1.0, ratio, 1.0, 1.0, m1, 1.0)?.with_eta(w.overlay_eta)?;
    let (n1, n2) = split_counts(w.overlay_n, &p);
    let s0 = init_random_disk(n1, n2, 1.0, cfg.sim.seed, &p)?;
    let ctl = RunControls {
        dt_max: w.overlay_dt_max,
        energy_every_step: false,
        diag_every: (w.overlay_t_end / 10.0).max(1e-3),
        snapshot_every: None,
        ..RunControls::default()
    };
    let (s, _) = run(&s0, w.overlay_t_end, &ctl)?;
    Ok(morphology(&s)?.d_over_r)
}

pub fn weakcross(cfg: &RunConfig) -> Result<Output, CliError> {
    let w = &cfg.weak;
    if let Some(r) = w.ratio {
        let s = d_of_ab_ratio(r)?;
        return Ok(Output::summary(json!({
            "ratio_ab": s.ratio_ab, "d_over_R": s.d_over_r, "regime": s.regime.name(), "residual": s.residual,
        })));
    }
    let curve = curve_sample(w.ratio_min, w.ratio_max, w.points)?;
    let mut t = Table::new(&["ratio_ab", "d_over_R", "regime", "residual"]);
    for s in &curve {
        t.row([num(s.ratio_ab), num(s.d_over_r), s.regime.name().to_string(), num(s.residual)]);
    }
    let mut out = Output::summary(json!({ "points": curve.len(), "ratio_min": w.ratio_min, "ratio_max": w.ratio_max }));
    out.primary = Some(("weakcross.csv".into(), t.finish()));
    let mut overlay = Vec::new();
    if w.overlay {
        if cfg.output.out_dir.is_none() {
            return Err(CliError::config("the particle overlay needs an output directory".into()));
        }
        let jobs: Vec<(f64, f64)> = w.overlay_masses.iter().flat_map(|&m| w.overlay_ratios.iter().map(move |&r| (m, r))).collect();
        let ds: Vec<f64> = jobs.par_iter().map(|&(m, r)| overlay_point(cfg, r, m)).collect::<Result<_, _>>()?;
        let mut t = Table::new(&["ratio_ab", "M", "d_over_R_particles", "d_over_R_curve"]);
        for (&(m, r), &d) in jobs.iter().zip(&ds) {
            let c = d_of_ab_ratio(r)?.d_over_r;
            t.row([num(r), num(m), num(d), num(c)]);
            overlay.push((m, r, d));
        }
        out.file("overlay.csv", t.finish());
        out.summary["overlay_runs"] = json!(jobs.len());
    }
    if cfg.output.svg {
        let line: Vec<(f64, f64)> = curve.iter().map(|s| (s.ratio_ab, s.d_over_r)).collect();
        let (xr, yr) = Plot::bounds(line.iter().copied().chain(overlay.iter().map(|o| (o.1, o.2))));
        let mut plot = Plot::new(xr, (0.0, yr.1), "Centre-of-mass separation", "A/B", "d/R");
        plot.line(&line, GREY, Some("closed form"));
        for (m, color) in w.overlay_masses.iter().zip([BLUE, ORANGE, "#2ca02c", "#d62728"].iter().cycle()) {
            let pts: Vec<(f64, f64)> = overlay.iter().filter(|o| o.0 == *m).map(|o| (o.1, o.2)).collect();
            if !pts.is_empty() {
                plot.dots(&pts, color, 4.0, Some(&format!("particles, M = {}", num(*m))));
            }
        }
        out.file("weakcross.svg", plot.render());
    }
    Ok(out)
}

fn verdict_cell(kind: EquilibriumKind, p: &InteractionParams, m_max: u32) -> Result<(bool, &'static str), Error> {
    let eq = build_equilibrium(kind, p)?;
    if !eq.exists {
        return Ok((false, "none"));
    }
    let v: Verdict = stability_report(kind, p, m_max)?.overall;
    Ok((true, v.name()))
}

fn region_color(r: RegionId) -> &'static str {
    match r {
        RegionId::D1 => "#e6d3f0",
        RegionId::D2 => "#d3e4f5",
        RegionId::D3 => "#f7d6c4",
        RegionId::D4 => "#cfeccf",
        RegionId::D5 => "#f4efc2",
        RegionId::D6 => "#d6d6d6",
        _ => "#ffffff",
    }
}

pub fn phase_diagram(cfg: &RunConfig) -> Result<Output, CliError> {
    let g = cfg.sweep;
    let m = to_phase_point(&cfg.params).m;
    let n = g.n;
    let axis = |k: usize, max: f64| max * (k as f64 + 0.5) / n as f64;
    type Cell = (f64, f64, RegionId, (bool, &'static str), (bool, &'static str));
    let rows: Vec<Vec<Cell>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let b = axis(j, g.b_max);
            (0..n)
                .map(|i| {
                    let a = axis(i, g.a_max);
                    let p = InteractionParams::from_phase(a, b, m)?;
                    let r = classify_region(&to_phase_point(&p), TAU_REGION);
                    let light = verdict_cell(EquilibriumKind::TargetLightIn, &p, cfg.m_max)?;
                    let heavy = verdict_cell(EquilibriumKind::TargetHeavyIn, &p, cfg.m_max)?;
                    Ok((a, b, r, light, heavy))
                })
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(&["A", "B", "region", "light_exists", "light_verdict", "heavy_exists", "heavy_verdict"]);
    let mut light_stable = 0usize;
    for c in rows.iter().flatten() {
        light_stable += (c.3 .1 == "stable") as usize;
        t.row([num(c.0), num(c.1), c.2.name().into(), c.3 .0.to_string(), c.3 .1.into(), c.4 .0.to_string(), c.4 .1.into()]);
    }
    let mut out = Output::summary(json!({ "M": m, "n": n, "a_max": g.a_max, "b_max": g.b_max, "m_max": cfg.m_max, "light_stable_cells": light_stable }));
    out.primary = Some(("phase_diagram.csv".into(), t.finish()));
    if cfg.output.svg {
        let mut plot = Plot::new((0.0, g.a_max), (0.0, g.b_max), &format!("Phase plane, M = {}", num(m)), "A", "B");
        let (da, db) = (g.a_max / n as f64, g.b_max / n as f64);
        for (j, row) in rows.iter().enumerate() {
            // One rectangle per run of equal colour.
            let mut start = 0;
            for i in 1..=n {
                let shade = |k: usize| (region_color(row[k].2), row[k].3 .1 == "stable");
                if i == n || shade(i) != shade(start) {
                    let (color, stable) = shade(start);
                    let (y0, y1) = (j as f64 * db, (j + 1) as f64 * db);
                    plot.rect(start as f64 * da, y0, i as f64 * da, y1, color);
                    if stable {
                        plot.rect(start as f64 * da, y0, i as f64 * da, y1, "rgba(0,100,0,0.25)");
                    }
                    start = i;
                }
            }
        }
        let k = 400;
        let bs: Vec<f64> = (0..=k).map(|i| g.b_max * i as f64 / k as f64).collect();
        plot.line(&bs.iter().map(|&b| (c1(b, m), b)).collect::<Vec<_>>(), "black", Some("A = c1(B)"));
        plot.line(&bs.iter().map(|&b| (c2(b, m), b)).collect::<Vec<_>>(), "#8c564b", Some("A = c2(B)"));
        plot.line(&[(0.0, 0.0), (g.a_max.min(g.b_max), g.a_max.min(g.b_max))], GREY, Some("B = A"));
        for (mm, color) in [(2, "#d62728"), (3, "#9467bd"), (4, "#17becf")] {
            plot.line(&um_curve(mm, m, g.a_max, k), color, Some(&format!("U{mm} boundary")));
        }
        plot.key("light target stable", "rgba(0,100,0,0.25)");
        out.file("phase_diagram.svg", plot.render());
    }
    Ok(out)
}
