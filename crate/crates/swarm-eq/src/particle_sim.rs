//! Two-species particle system with direct pairwise summation, an adaptive
//! RK4 stepper, initializers and shape diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::equilibria::{EquilibriumConfig, EquilibriumKind};
use crate::error::{Error, Result};
use crate::model_core::{InteractionParams, DELTA_MIN};

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub pos1: Vec<Point>,
    pub pos2: Vec<Point>,
    /// Per-particle weights `M_1 / N_1` and `M_2 / N_2`.
    pub w1: f64,
    pub w2: f64,
    pub t: f64,
    pub params: InteractionParams,
}

/// Split `n` particles between the species in proportion to their masses.
pub fn split_counts(n: usize, p: &InteractionParams) -> (usize, usize) {
    let n1 = ((n as f64) * p.m1() / (p.m1() + p.m2())).round() as usize;
    let n1 = n1.clamp(1, n.saturating_sub(1).max(1));
    (n1, n.saturating_sub(n1).max(1))
}

impl ParticleState {
    pub fn new(pos1: Vec<Point>, pos2: Vec<Point>, params: InteractionParams) -> Result<Self> {
        if pos1.is_empty() || pos2.is_empty() {
            return Err(Error::InvalidParams("each species needs at least one particle".into()));
        }
        if pos1.iter().chain(&pos2).any(|x| !x[0].is_finite() || !x[1].is_finite()) {
            return Err(Error::InvalidParams("non-finite particle coordinate".into()));
        }
        let w1 = params.m1() / pos1.len() as f64;
        let w2 = params.m2() / pos2.len() as f64;
        Ok(ParticleState { pos1, pos2, w1, w2, t: 0.0, params })
    }

    pub fn n1(&self) -> usize {
        self.pos1.len()
    }

    pub fn n2(&self) -> usize {
        self.pos2.len()
    }

    fn len(&self) -> usize {
        self.pos1.len() + self.pos2.len()
    }

    fn point(&self, k: usize) -> Point {
        if k < self.pos1.len() {
            self.pos1[k]
        } else {
            self.pos2[k - self.pos1.len()]
        }
    }

    pub fn com(&self, species: usize) -> Point {
        let pts = if species == 1 { &self.pos1 } else { &self.pos2 };
        mean(pts)
    }

    /// Mass-weighted centre of both species together.
    pub fn com_total(&self) -> Point {
        let (c1, c2) = (self.com(1), self.com(2));
        let (m1, m2) = (self.params.m1(), self.params.m2());
        let m = m1 + m2;
        [(m1 * c1[0] + m2 * c2[0]) / m, (m1 * c1[1] + m2 * c2[1]) / m]
    }

    fn with_offsets(&self, base: &ParticleState, vel: &[Point], h: f64) -> ParticleState {
        let mut s = self.clone();
        let n1 = base.pos1.len();
        for (k, v) in vel.iter().enumerate() {
            let x = base.point(k);
            let y = [x[0] + h * v[0], x[1] + h * v[1]];
            if k < n1 {
                s.pos1[k] = y;
            } else {
                s.pos2[k - n1] = y;
            }
        }
        s
    }
}

fn mean(pts: &[Point]) -> Point {
    let n = pts.len() as f64;
    let s = pts.iter().fold([0.0, 0.0], |a, x| [a[0] + x[0], a[1] + x[1]]);
    [s[0] / n, s[1] / n]
}

/// Collision threshold `1e-12 sqrt(a_s / b_s)`.
pub fn delta_min(p: &InteractionParams) -> f64 {
    DELTA_MIN * p.self_radius()
}

/// Velocities of all particles, species 1 first.
pub fn forces(s: &ParticleState) -> Result<Vec<Point>> {
    let p = &s.params;
    let n1 = s.pos1.len();
    let n = s.len();
    let dmin = delta_min(p);
    let pts: Vec<Point> = (0..n).map(|k| s.point(k)).collect();
    pts.par_iter()
        .enumerate()
        .map(|(i, &xi)| {
            let own1 = i < n1;
            let mut v = [0.0, 0.0];
            for (j, xj) in pts.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = [xi[0] - xj[0], xi[1] - xj[1]];
                let r2 = d[0] * d[0] + d[1] * d[1];
                if r2 < dmin * dmin {
                    return Err(Error::ParticleCollision(i.min(j), i.max(j)));
                }
                let other1 = j < n1;
                let (a, b) = if own1 == other1 { (p.a_s(), p.b_s()) } else { (p.a_c(), p.b_c()) };
                let w = if other1 { s.w1 } else { s.w2 };
                let c = w * (a / r2 - b);
                v[0] += c * d[0];
                v[1] += c * d[1];
            }
            Ok(v)
        })
        .collect()
}

/// Discrete interaction energy.
pub fn energy(s: &ParticleState) -> f64 {
    let p = &s.params;
    let n1 = s.pos1.len();
    let n = s.len();
    let pts: Vec<Point> = (0..n).map(|k| s.point(k)).collect();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let own1 = i < n1;
            let wi = if own1 { s.w1 } else { s.w2 };
            let mut e = 0.0;
            for j in (i + 1)..n {
                let other1 = j < n1;
                let (a, b) = if own1 == other1 { (p.a_s(), p.b_s()) } else { (p.a_c(), p.b_c()) };
                let wj = if other1 { s.w1 } else { s.w2 };
                let d = [pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]];
                let r2 = d[0] * d[0] + d[1] * d[1];
                e += wi * wj * (-0.5 * a * r2.ln() + 0.5 * b * r2);
            }
            e
        })
        .collect();
    rows.iter().sum()
}

/// One classical RK4 step.
pub fn step(s: &ParticleState, dt: f64) -> Result<ParticleState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
    }
    let k1 = forces(s)?;
    let k2 = forces(&s.with_offsets(s, &k1, 0.5 * dt))?;
    let k3 = forces(&s.with_offsets(s, &k2, 0.5 * dt))?;
    let k4 = forces(&s.with_offsets(s, &k3, dt))?;
    let comb: Vec<Point> = (0..k1.len())
        .map(|k| {
            [
                (k1[k][0] + 2.0 * k2[k][0] + 2.0 * k3[k][0] + k4[k][0]) / 6.0,
                (k1[k][1] + 2.0 * k2[k][1] + 2.0 * k3[k][1] + k4[k][1]) / 6.0,
            ]
        })
        .collect();
    let mut out = s.with_offsets(s, &comb, dt);
    out.t = s.t + dt;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunControls {
    pub dt_init: f64,
    pub dt_max: f64,
    /// Halve `dt` when a particle moves more than this times `sqrt(a_s/b_s)`.
    pub max_disp: f64,
    /// Double `dt` (up to `dt_max`) when every particle moves less than this.
    pub grow_disp: f64,
    /// Model-time spacing of diagnostic samples.
    pub diag_every: f64,
    /// Model-time spacing of stored snapshots; `None` keeps only the final state.
    pub snapshot_every: Option<f64>,
    /// Evaluate the energy after every accepted step.
    pub energy_every_step: bool,
}

impl Default for RunControls {
    fn default() -> Self {
        RunControls {
            dt_init: 1e-3,
            dt_max: 0.05,
            max_disp: 0.1,
            grow_disp: 0.025,
            diag_every: 1.0,
            snapshot_every: None,
            energy_every_step: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagSample {
    pub t: f64,
    pub energy: f64,
    pub com_total: Point,
    pub com1: Point,
    pub com2: Point,
    pub d_over_r: f64,
    pub max_speed: f64,
    pub support_radii: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub pos1: Vec<Point>,
    pub pos2: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub samples: Vec<DiagSample>,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    pub rejected: usize,
    /// Largest `E_{n+1} - E_n` over accepted steps (only with `energy_every_step`).
    pub max_energy_increase: f64,
    pub initial_energy: f64,
}

impl RunDiagnostics {
    /// Largest distance of the total centre of mass from its initial value,
    /// per unit of elapsed time.
    pub fn com_drift_rate(&self) -> f64 {
        let (Some(a), Some(b)) = (self.samples.first(), self.samples.last()) else {
            return 0.0;
        };
        let t = b.t - a.t;
        if t <= 0.0 {
            return 0.0;
        }
        self.samples
            .iter()
            .map(|s| (s.com_total[0] - a.com_total[0]).hypot(s.com_total[1] - a.com_total[1]))
            .fold(0.0, f64::max)
            / t
    }
}

fn percentile(mut v: Vec<f64>, q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

fn distances(pts: &[Point], c: Point) -> Vec<f64> {
    pts.iter().map(|x| (x[0] - c[0]).hypot(x[1] - c[1])).collect()
}

fn sample(s: &ParticleState, vel: &[Point], energy_value: f64) -> DiagSample {
    let r = s.params.self_radius();
    let (c1, c2) = (s.com(1), s.com(2));
    DiagSample {
        t: s.t,
        energy: energy_value,
        com_total: s.com_total(),
        com1: c1,
        com2: c2,
        d_over_r: (c1[0] - c2[0]).hypot(c1[1] - c2[1]) / r,
        max_speed: vel.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max),
        support_radii: [percentile(distances(&s.pos1, c1), 0.95), percentile(distances(&s.pos2, c2), 0.95)],
    }
}

fn max_disp(a: &ParticleState, b: &ParticleState) -> f64 {
    a.pos1
        .iter()
        .zip(&b.pos1)
        .chain(a.pos2.iter().zip(&b.pos2))
        .map(|(x, y)| (x[0] - y[0]).hypot(x[1] - y[1]))
        .fold(0.0, f64::max)
}

/// Integrate to `t_end` with displacement-controlled RK4.
pub fn run(s0: &ParticleState, t_end: f64, ctl: &RunControls) -> Result<(ParticleState, RunDiagnostics)> {
    if !(ctl.dt_init > 0.0 && ctl.dt_max > 0.0 && ctl.diag_every > 0.0) {
        return Err(Error::InvalidParams("run controls need positive dt_init, dt_max, diag_every".into()));
    }
    let r = s0.params.self_radius();
    let (hi, lo) = (ctl.max_disp * r, ctl.grow_disp * r);
    let mut s = s0.clone();
    let e0 = energy(&s);
    let mut diag = RunDiagnostics {
        samples: vec![sample(&s, &forces(&s)?, e0)],
        snapshots: Vec::new(),
        steps: 0,
        rejected: 0,
        max_energy_increase: f64::NEG_INFINITY,
        initial_energy: e0,
    };
    let snap = |s: &ParticleState| Snapshot { t: s.t, pos1: s.pos1.clone(), pos2: s.pos2.clone() };
    if ctl.snapshot_every.is_some() {
        diag.snapshots.push(snap(&s));
    }
    let mut e_prev = e0;
    let mut dt = ctl.dt_init.min(ctl.dt_max);
    let mut k_diag = 1u64;
    let mut k_snap = 1u64;
    let t_start = s.t;
    let tiny = 1e-12 * t_end.abs().max(1.0);
    while s.t < t_end - tiny {
        let next_diag = t_start + k_diag as f64 * ctl.diag_every;
        let next_snap = ctl.snapshot_every.map(|h| t_start + k_snap as f64 * h).unwrap_or(f64::INFINITY);
        let target = next_diag.min(next_snap).min(t_end);
        let h = dt.min(target - s.t);
        let trial = step(&s, h)?;
        if max_disp(&s, &trial) > hi {
            diag.rejected += 1;
            dt = 0.5 * h;
            if dt < 1e-12 {
                return Err(Error::StepUnderflow(dt));
            }
            continue;
        }
        if max_disp(&s, &trial) < lo && h == dt {
            dt = (2.0 * dt).min(ctl.dt_max);
        }
        s = trial;
        diag.steps += 1;
        if (s.t - target).abs() <= tiny {
            s.t = target;
        }
        if ctl.energy_every_step {
            let e = energy(&s);
            diag.max_energy_increase = diag.max_energy_increase.max(e - e_prev);
            e_prev = e;
        }
        if s.t >= next_diag - tiny || s.t >= t_end - tiny {
            let e = if ctl.energy_every_step { e_prev } else { energy(&s) };
            diag.samples.push(sample(&s, &forces(&s)?, e));
            while t_start + k_diag as f64 * ctl.diag_every <= s.t + tiny {
                k_diag += 1;
            }
        }
        if let Some(hs) = ctl.snapshot_every {
            if s.t >= next_snap - tiny {
                diag.snapshots.push(snap(&s));
                while t_start + k_snap as f64 * hs <= s.t + tiny {
                    k_snap += 1;
                }
            }
        }
    }
    if ctl.snapshot_every.is_some() && diag.snapshots.last().map(|x| x.t) != Some(s.t) {
        diag.snapshots.push(snap(&s));
    }
    Ok((s, diag))
}

/// Uniform random points in a centred disk.
pub fn init_random_disk(n1: usize, n2: usize, radius: f64, seed: u64, p: &InteractionParams) -> Result<ParticleState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |n: usize| -> Vec<Point> {
        (0..n)
            .map(|_| {
                let r = radius * rng.random::<f64>().sqrt();
                let th = 2.0 * PI * rng.random::<f64>();
                [r * th.cos(), r * th.sin()]
            })
            .collect()
    };
    let pos1 = draw(n1);
    let pos2 = draw(n2);
    ParticleState::new(pos1, pos2, *p)
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Largest-remainder rounding of `n` proportional to `weights`.
fn apportion(n: usize, weights: &[f64]) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| n as f64 * w / total).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut left = n - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    for &k in order.iter().cycle() {
        if left == 0 {
            break;
        }
        if weights[k] > 0.0 {
            counts[k] += 1;
            left -= 1;
        }
    }
    counts
}

/// Stratified sample of the equilibrium ansatz: per-subdomain counts follow
/// the subdomain masses; inside each annulus points follow a golden-angle
/// spiral in the area coordinate with a seeded rotation and radial jitter.
pub fn init_from_equilibrium(cfg: &EquilibriumConfig, n1: usize, n2: usize, seed: u64) -> Result<ParticleState> {
    if !cfg.exists {
        return Err(Error::EquilibriumMissing(cfg.reason.clone()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fill = |species: usize, n: usize| -> Vec<Point> {
        let masses: Vec<f64> = cfg.subdomains.iter().map(|sd| sd.rho(species) * sd.area()).collect();
        let counts = apportion(n, &masses);
        let mut out = Vec::with_capacity(n);
        for (sd, &c) in cfg.subdomains.iter().zip(&counts) {
            let rot = 2.0 * PI * rng.random::<f64>();
            let (a2, b2) = (sd.r_in * sd.r_in, sd.r_out * sd.r_out);
            for k in 0..c {
                let u = (k as f64 + 0.5 + 0.8 * (rng.random::<f64>() - 0.5)) / c as f64;
                let r = (a2 + u * (b2 - a2)).sqrt();
                let th = rot + k as f64 * GOLDEN_ANGLE;
                out.push([r * th.cos(), r * th.sin()]);
            }
        }
        out
    };
    let pos1 = fill(1, n1);
    let pos2 = fill(2, n2);
    ParticleState::new(pos1, pos2, cfg.params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MorphologyLabel {
    Mixed,
    PartialOverlap,
    Tangential,
    Separated,
    TargetLike,
}

impl MorphologyLabel {
    pub fn name(self) -> &'static str {
        match self {
            MorphologyLabel::Mixed => "mixed",
            MorphologyLabel::PartialOverlap => "partial-overlap",
            MorphologyLabel::Tangential => "tangential",
            MorphologyLabel::Separated => "separated",
            MorphologyLabel::TargetLike => "target-like",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Morphology {
    pub d_over_r: f64,
    /// 95th-percentile distance from each species' own centre of mass.
    pub support_radii: [f64; 2],
    /// Fraction of particles inside the other species' support disk.
    pub overlap_fraction: f64,
    pub label: MorphologyLabel,
}

/// Distance quantiles of one species from the total centre of mass.
pub fn radial_quantile(s: &ParticleState, species: usize, q: f64) -> f64 {
    let pts = if species == 1 { &s.pos1 } else { &s.pos2 };
    percentile(distances(pts, s.com_total()), q)
}

/// Radius of a uniform disk with the observed `q`-quantile `r_q`.
pub fn uniform_disk_radius(r_q: f64, q: f64) -> f64 {
    r_q / q.sqrt()
}

/// Inner and outer radius of a uniform annulus from two radial quantiles.
pub fn uniform_annulus_radii(r_lo: f64, q_lo: f64, r_hi: f64, q_hi: f64) -> (f64, f64) {
    let d = (r_hi * r_hi - r_lo * r_lo) / (q_hi - q_lo);
    let inner2 = r_lo * r_lo - q_lo * d;
    (inner2.max(0.0).sqrt(), (inner2 + d).max(0.0).sqrt())
}

/// Radii of a uniform disk (`inner = 0`) or annulus matching the first two
/// radial moments `<r^2>`, `<r^4>` of one species about the total centre of mass.
pub fn moment_radii(s: &ParticleState, species: usize, annulus: bool) -> (f64, f64) {
    let pts = if species == 1 { &s.pos1 } else { &s.pos2 };
    let c = s.com_total();
    let n = pts.len() as f64;
    let r2: Vec<f64> = pts.iter().map(|x| (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)).collect();
    let m2 = r2.iter().sum::<f64>() / n;
    if !annulus {
        return (0.0, (2.0 * m2).sqrt());
    }
    let m4 = r2.iter().map(|v| v * v).sum::<f64>() / n;
    // R_in^2 and R_out^2 are the roots of z^2 - s z + p.
    let sum = 2.0 * m2;
    let prod = sum * sum - 3.0 * m4;
    let disc = (sum * sum - 4.0 * prod).max(0.0).sqrt();
    ((0.5 * (sum - disc)).max(0.0).sqrt(), (0.5 * (sum + disc)).sqrt())
}

pub fn morphology(s: &ParticleState) -> Result<Morphology> {
    let n = s.n1().min(s.n2());
    if n < 10 {
        return Err(Error::TooFewParticles(n));
    }
    let r = s.params.self_radius();
    let (c1, c2) = (s.com(1), s.com(2));
    let d_over_r = (c1[0] - c2[0]).hypot(c1[1] - c2[1]) / r;
    let support_radii = [percentile(distances(&s.pos1, c1), 0.95), percentile(distances(&s.pos2, c2), 0.95)];
    let inside = |pts: &[Point], c: Point, rad: f64| pts.iter().filter(|x| (x[0] - c[0]).hypot(x[1] - c[1]) <= rad).count();
    let overlap_fraction = (inside(&s.pos1, c2, support_radii[1]) + inside(&s.pos2, c1, support_radii[0])) as f64
        / (s.n1() + s.n2()) as f64;
    let nested = |outer: usize| {
        let inner = 3 - outer;
        radial_quantile(s, outer, 0.05) >= 0.9 * radial_quantile(s, inner, 0.95)
    };
    let label = if d_over_r < 0.1 && (nested(1) || nested(2)) {
        MorphologyLabel::TargetLike
    } else if d_over_r < 0.1 {
        MorphologyLabel::Mixed
    } else if (d_over_r - 2.0).abs() < 0.1 {
        MorphologyLabel::Tangential
    } else if d_over_r > 2.1 {
        MorphologyLabel::Separated
    } else {
        MorphologyLabel::PartialOverlap
    };
    Ok(Morphology { d_over_r, support_radii, overlap_fraction, label })
}

/// Distance of the inner species' centre of mass from the total centre of
/// mass, over `sqrt(a_s/b_s)`. Grows under a mode-1 instability.
pub fn inner_core_offset(s: &ParticleState, kind: EquilibriumKind) -> f64 {
    let c = s.com(kind.inner_species());
    let t = s.com_total();
    (c[0] - t[0]).hypot(c[1] - t[1]) / s.params.self_radius()
}

/// Ratio of the principal second moments of the inner species about its
/// own centre of mass. Grows under a mode-2 instability.
pub fn inner_core_anisotropy(s: &ParticleState, kind: EquilibriumKind) -> f64 {
    let pts = if kind.inner_species() == 1 { &s.pos1 } else { &s.pos2 };
    let c = mean(pts);
    let n = pts.len() as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for x in pts {
        let (dx, dy) = (x[0] - c[0], x[1] - c[1]);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let (sxx, sxy, syy) = (sxx / n, sxy / n, syy / n);
    let tr = 0.5 * (sxx + syy);
    let disc = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let (hi, lo) = (tr + disc, tr - disc);
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
