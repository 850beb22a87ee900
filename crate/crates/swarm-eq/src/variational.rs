//! Energy, the first-variation profiles `Lambda_1`, `Lambda_2`, the
//! off-support minimizer test and a grid evaluator for the second variation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::disk::{self, Layer};
use crate::equilibria::{EquilibriumConfig, EquilibriumKind};
use crate::error::{Error, Result};
use crate::model_core::{kernel_value, InteractionParams};
use crate::quad;

/// `Lambda'(r) = alpha r + beta / r` on `[r_lo, r_hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaPiece {
    pub r_lo: f64,
    pub r_hi: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl LambdaPiece {
    /// Interior stationary point, if any.
    pub fn stationary(&self) -> Option<f64> {
        if self.alpha * self.beta < 0.0 {
            let r = (-self.beta / self.alpha).sqrt();
            (r > self.r_lo && r < self.r_hi).then_some(r)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaProfile {
    pub species: usize,
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<LambdaPiece>,
    /// Value on the species' support.
    pub plateau: f64,
    self_layers: Vec<Layer>,
    cross_layers: Vec<Layer>,
    self_ab: (f64, f64),
    cross_ab: (f64, f64),
}

impl LambdaProfile {
    pub fn value(&self, r: f64) -> f64 {
        disk::potential(&self.self_layers, self.self_ab.0, self.self_ab.1, r)
            + disk::potential(&self.cross_layers, self.cross_ab.0, self.cross_ab.1, r)
    }

    pub fn deriv(&self, r: f64) -> f64 {
        let p = self.piece_at(r);
        p.alpha * r + p.beta / r
    }

    pub fn piece_at(&self, r: f64) -> &LambdaPiece {
        self.pieces
            .iter()
            .find(|p| r >= p.r_lo && r < p.r_hi)
            .unwrap_or_else(|| self.pieces.last().expect("pieces"))
    }
}

pub fn lambda_profile(cfg: &EquilibriumConfig, species: usize) -> Result<LambdaProfile> {
    if !cfg.exists {
        return Err(Error::EquilibriumMissing(cfg.reason.clone()));
    }
    if species != 1 && species != 2 {
        return Err(Error::InvalidParams(format!("species must be 1 or 2, got {species}")));
    }
    let p = &cfg.params;
    let self_layers = cfg.layers(species);
    let cross_layers = cfg.layers(3 - species);
    let self_ab = (p.a_s(), p.b_s());
    let cross_ab = (p.a_c(), p.b_c());

    let mut breakpoints: Vec<f64> = self_layers.iter().chain(&cross_layers).map(|l| l.radius).collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();

    let mut edges = vec![0.0];
    edges.extend(breakpoints.iter().copied());
    edges.push(f64::INFINITY);
    let pieces = edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let probe = if w[1].is_finite() { 0.5 * (w[0] + w[1]) } else { w[0] + 1.0 };
            let (a1, b1) = disk::grad_coefficients(&self_layers, self_ab.0, self_ab.1, probe);
            let (a2, b2) = disk::grad_coefficients(&cross_layers, cross_ab.0, cross_ab.1, probe);
            LambdaPiece { r_lo: w[0], r_hi: w[1], alpha: a1 + a2, beta: b1 + b2 }
        })
        .collect();

    let mut prof = LambdaProfile {
        species,
        breakpoints,
        pieces,
        plateau: 0.0,
        self_layers,
        cross_layers,
        self_ab,
        cross_ab,
    };
    let (lo, hi) = cfg.support(species)[0];
    prof.plateau = prof.value(0.5 * (lo + hi));
    Ok(prof)
}

/// `Lambda_i(r)` by direct polar quadrature of the defining convolutions.
pub fn lambda_quadrature_oracle(cfg: &EquilibriumConfig, species: usize, r: f64) -> Result<f64> {
    if !cfg.exists {
        return Err(Error::EquilibriumMissing(cfg.reason.clone()));
    }
    for sd in &cfg.subdomains {
        for &b in &[sd.r_in, sd.r_out] {
            if b > 0.0 && (r - b).abs() < 1e-6 * b.max(1.0) {
                return Err(Error::QuadratureNonConvergence(0.0));
            }
        }
    }
    let p = &cfg.params;
    let mut total = 0.0;
    for sd in &cfg.subdomains {
        let w_self = sd.rho(species);
        let w_cross = sd.rho(3 - species);
        if w_self == 0.0 && w_cross == 0.0 {
            continue;
        }
        let ring = |s: f64| -> Result<f64> {
            // 2 * int_0^pi K(|x - y|) dphi with |y| = s, x = (r, 0).
            let f = |phi: f64| {
                let d = ((r - s).powi(2) + 4.0 * r * s * (0.5 * phi).sin().powi(2)).sqrt();
                w_self * kernel_value(p.a_s(), p.b_s(), d) + w_cross * kernel_value(p.a_c(), p.b_c(), d)
            };
            // Near s = r the integrand peaks in a window of width ~|r - s| around phi = 0.
            let w = ((r - s).abs() / r.max(s).max(1e-300)).min(0.5);
            Ok(2.0 * quad::integrate_breaks(f, &[0.0, w, PI], 1e-13, 1e-13)?)
        };
        let mut pts = vec![sd.r_in];
        if r > sd.r_in && r < sd.r_out {
            pts.push(r);
        }
        pts.push(sd.r_out);
        let mut err = None;
        let v = quad::integrate_breaks(
            |s| {
                if err.is_some() {
                    return 0.0;
                }
                match ring(s) {
                    Ok(v) => v * s,
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            },
            &pts,
            1e-11,
            1e-12,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        total += v;
    }
    Ok(total)
}

/// `f(A) = ((AM+1)/(A+M)) (1+AM)^{1/(AM)} (1+M/A)^{-A/M}`.
pub fn f_of_a(a: f64, m: f64) -> f64 {
    let am = a * m;
    (am + 1.0) / (a + m) * (1.0 + am).powf(1.0 / am) * (1.0 + m / a).powf(-a / m)
}

/// `g(A) = ((A+M)/(AM+1)) (1+A/M)^{M/A} (1+1/(AM))^{-AM}`.
pub fn g_of_a(a: f64, m: f64) -> f64 {
    let am = a * m;
    (a + m) / (am + 1.0) * (1.0 + a / m).powf(m / a) * (1.0 + 1.0 / am).powf(-am)
}

fn check_range(v: f64, m: f64) -> Result<()> {
    if v > 1.0 / m && v < m {
        Ok(())
    } else {
        Err(Error::FOutOfRange { value: v, lo: 1.0 / m, hi: m })
    }
}

/// `B* = (M f(A) - 1) / (M - f(A))`: the light-inside target fails the
/// off-support test iff `B < B*` (for `A > 1`).
pub fn target_nonminimizer_boundary(a: f64, m: f64) -> Result<f64> {
    if !(a > 1.0) {
        return Err(Error::OutOfRange(a));
    }
    let f = f_of_a(a, m);
    check_range(f, m)?;
    Ok((m * f - 1.0) / (m - f))
}

/// Heavy-inside analogue: the target fails the off-support test iff
/// `(B + M)/(BM + 1) < g(A)`, i.e. iff `B > (M - g)/(g M - 1)`.
pub fn heavy_target_nonminimizer_boundary(a: f64, m: f64) -> Result<f64> {
    let g = g_of_a(a, m);
    check_range(g, m)?;
    Ok((m - g) / (g * m - 1.0))
}

/// Closed-form plateau `lambda_2` of the light-inside target.
pub fn lambda2_target_closed_form(p: &InteractionParams) -> f64 {
    let cfg = crate::equilibria::target_shape(p, p.m1(), p.m2());
    let (r2, r1, r0) = (cfg.r_disk, cfg.r_gap, cfg.r_out);
    let (a_s, a_c, b_s, b_c, m1, m2) = (p.a_s(), p.a_c(), p.b_s(), p.b_c(), p.m1(), p.m2());
    let (rho1, rho2) = (cfg.rho_ann, cfg.rho_disk);
    0.5 * (a_c * m1 + a_s * m2)
        - rho1 * a_c * (PI * r0 * r0 * r0.ln() - PI * r1 * r1 * r1.ln())
        - rho2 * a_s * PI * r2 * r2 * r2.ln()
        + 0.25 * (b_c * m1 * (r0 * r0 + r1 * r1) + b_s * m2 * r2 * r2)
}

/// Closed-form exterior minimum `lambda_m` of `Lambda_2` for the light-inside target.
pub fn lambda_m_target_closed_form(p: &InteractionParams) -> f64 {
    let cfg = crate::equilibria::target_shape(p, p.m1(), p.m2());
    let (r2, r1, r0) = (cfg.r_disk, cfg.r_gap, cfg.r_out);
    let (a_s, a_c, b_s, b_c, m1, m2) = (p.a_s(), p.a_c(), p.b_s(), p.b_c(), p.m1(), p.m2());
    let w = a_c * m1 + a_s * m2;
    0.5 * w - 0.5 * w * (w / (b_c * m1 + b_s * m2)).ln() + 0.25 * (b_c * m1 * (r0 * r0 + r1 * r1) + b_s * m2 * r2 * r2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesCheck {
    pub plateau: f64,
    /// Smallest `Lambda - lambda` off the support and where it occurs.
    pub min_excess: f64,
    pub argmin: f64,
    /// Minimum of `Lambda` beyond the outermost radius, if `Lambda` has a
    /// stationary point there.
    pub exterior_min: Option<f64>,
    pub local_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizerVerdict {
    pub is_class_b_minimizer: bool,
    pub failure_radius: Option<f64>,
    pub failure_species: Option<usize>,
    pub lambda_support: [f64; 2],
    /// Exterior minimum of the profile of the inner species.
    pub lambda_min_exterior: Option<f64>,
    /// `Lambda >= lambda` next to every support boundary but not globally.
    pub swarm_minimizer: bool,
    pub species: [SpeciesCheck; 2],
}

fn complement(support: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut cur = 0.0;
    for &(lo, hi) in support {
        if lo > cur {
            out.push((cur, lo));
        }
        cur = hi;
    }
    out.push((cur, f64::INFINITY));
    out
}

fn check_species(cfg: &EquilibriumConfig, species: usize) -> Result<SpeciesCheck> {
    let prof = lambda_profile(cfg, species)?;
    let lam = prof.plateau;
    let r_out = cfg.outer_radius();
    let support = cfg.support(species);
    let gaps = complement(&support);

    let mut stationary: Vec<f64> = prof.pieces.iter().filter_map(LambdaPiece::stationary).collect();
    stationary.sort_by(f64::total_cmp);
    let r_max = (3.0 * r_out).max(1.25 * stationary.last().copied().unwrap_or(0.0));

    let mut best = (f64::INFINITY, f64::NAN);
    let consider = |r: f64, best: &mut (f64, f64)| {
        let v = prof.value(r) - lam;
        if v < best.0 {
            *best = (v, r);
        }
    };
    for &(lo, hi) in &gaps {
        let inside = |r: f64| r > lo && r < hi;
        for &r in stationary.iter().filter(|&&r| inside(r)) {
            consider(r, &mut best);
        }
        let top = hi.min(r_max);
        if top > lo {
            let n = 400;
            for k in 1..n {
                consider(lo + (top - lo) * k as f64 / n as f64, &mut best);
            }
        }
    }

    let exterior_min = stationary
        .iter()
        .filter(|&&r| r > r_out)
        .map(|&r| prof.value(r))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));

    // Sign of Lambda' just off each support edge, pointing away from the support.
    let mut local_ok = true;
    let dscale = deriv_scale(cfg);
    for &(lo, hi) in &support {
        for (edge, dir) in [(lo, -1.0), (hi, 1.0)] {
            if edge <= 0.0 {
                continue;
            }
            let Some(&(glo, ghi)) = gaps.iter().find(|g| (dir < 0.0 && g.1 == edge) || (dir > 0.0 && g.0 == edge)) else {
                continue;
            };
            let room = if ghi.is_finite() { ghi - glo } else { edge };
            let h = 1e-3 * room.min(edge);
            if dir * prof.deriv(edge + dir * h) < -1e-12 * dscale {
                local_ok = false;
            }
        }
    }

    Ok(SpeciesCheck { plateau: lam, min_excess: best.0, argmin: best.1, exterior_min, local_ok })
}

fn energy_scale(cfg: &EquilibriumConfig) -> f64 {
    let p = &cfg.params;
    let r = cfg.outer_radius();
    (p.a_s() + p.a_c()) * (p.m1() + p.m2()) * (1.0 + r.ln().abs()) + (p.b_s() + p.b_c()) * (p.m1() + p.m2()) * r * r
}

fn deriv_scale(cfg: &EquilibriumConfig) -> f64 {
    energy_scale(cfg) / cfg.outer_radius()
}

/// Off-support test `Lambda_i >= lambda_i` for both species, by exact
/// stationary points of each piece plus a dense scan up to
/// `max(3 R_out, 1.25 r_last)` where `r_last` is the outermost stationary point.
pub fn minimizer_verdict(cfg: &EquilibriumConfig) -> Result<MinimizerVerdict> {
    let s1 = check_species(cfg, 1)?;
    let s2 = check_species(cfg, 2)?;
    let tol = 1e-10 * energy_scale(cfg);
    let fail1 = s1.min_excess < -tol;
    let fail2 = s2.min_excess < -tol;
    let global = !fail1 && !fail2;
    let failure_species = match (fail1, fail2) {
        (false, false) => None,
        (true, false) => Some(1),
        (false, true) => Some(2),
        (true, true) => Some(if s1.min_excess <= s2.min_excess { 1 } else { 2 }),
    };
    let failure_radius = failure_species.map(|s| if s == 1 { s1.argmin } else { s2.argmin });
    let inner = cfg.kind.inner_species();
    let lambda_min_exterior = if inner == 1 { s1.exterior_min } else { s2.exterior_min };
    Ok(MinimizerVerdict {
        is_class_b_minimizer: global,
        failure_radius,
        failure_species,
        lambda_support: [s1.plateau, s2.plateau],
        lambda_min_exterior,
        swarm_minimizer: s1.local_ok && s2.local_ok && !global,
        species: [s1, s2],
    })
}

/// Region table for the off-support test, used as an independent check of
/// [`minimizer_verdict`].
pub fn expected_minimizer(kind: EquilibriumKind, p: &InteractionParams) -> Option<bool> {
    use crate::model_core::{classify_region, to_phase_point, RegionId::*, TAU_REGION};
    let q = to_phase_point(p);
    let reg = classify_region(&q, TAU_REGION);
    if reg.is_boundary() {
        return None;
    }
    Some(match kind {
        EquilibriumKind::TargetLightIn => match reg {
            D4 | D5 => true,
            D3 => match target_nonminimizer_boundary(q.a, q.m) {
                Ok(t) => q.b >= t,
                // f(A) <= 1/M puts the threshold at negative B.
                Err(crate::Error::FOutOfRange { value, lo, .. }) if value <= lo => true,
                Err(_) => return None,
            },
            _ => return None,
        },
        EquilibriumKind::TargetHeavyIn => match reg {
            D2 | D3 => true,
            D4 => q.b <= heavy_target_nonminimizer_boundary(q.a, q.m).ok()?,
            _ => return None,
        },
        EquilibriumKind::OverlapLightIn => reg == D6,
        EquilibriumKind::OverlapHeavyIn => reg == D1,
    })
}

/// Energy of an equilibrium, `(lambda_1 M_1 + lambda_2 M_2) / 2`.
pub fn radial_energy(cfg: &EquilibriumConfig) -> Result<f64> {
    let l1 = lambda_profile(cfg, 1)?.plateau;
    let l2 = lambda_profile(cfg, 2)?.plateau;
    Ok(0.5 * (l1 * cfg.params.m1() + l2 * cfg.params.m2()))
}

/// Square grid of `n x n` cells covering `[-half_width, half_width]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub half_width: f64,
}

impl Grid {
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn center(&self, k: usize) -> [f64; 2] {
        let h = self.h();
        let (i, j) = (k % self.n, k / self.n);
        [-self.half_width + (i as f64 + 0.5) * h, -self.half_width + (j as f64 + 0.5) * h]
    }

    /// Mean of `ln|x - c|` over a cell with centre `c`.
    pub fn self_cell_log(&self) -> f64 {
        (0.5 * self.h()).ln() + 0.5 * (std::f64::consts::LN_2 - 3.0 + 0.5 * PI)
    }
}

fn moments(grid: &Grid, u: &[f64]) -> (f64, [f64; 2]) {
    let a = grid.h() * grid.h();
    let mut mass = 0.0;
    let mut mom = [0.0; 2];
    for (k, &v) in u.iter().enumerate() {
        let c = grid.center(k);
        mass += v * a;
        mom[0] += c[0] * v * a;
        mom[1] += c[1] * v * a;
    }
    (mass, mom)
}

/// Remove each species' mass, then split the joint first moment equally
/// between the two species and remove it with a linear field.
pub fn project_admissible(grid: &Grid, u1: &mut [f64], u2: &mut [f64]) {
    let area = grid.h() * grid.h();
    for u in [&mut *u1, &mut *u2] {
        let mean = u.iter().sum::<f64>() / u.len() as f64;
        u.iter_mut().for_each(|v| *v -= mean);
    }
    // Grid centroid is the origin, so x itself has zero mean.
    let mut g = [[0.0; 2]; 2];
    for k in 0..grid.len() {
        let c = grid.center(k);
        for a in 0..2 {
            for b in 0..2 {
                g[a][b] += c[a] * c[b] * area;
            }
        }
    }
    let (_, m1) = moments(grid, u1);
    let (_, m2) = moments(grid, u2);
    let m = [0.5 * (m1[0] + m2[0]), 0.5 * (m1[1] + m2[1])];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let coef = [(g[1][1] * m[0] - g[0][1] * m[1]) / det, (g[0][0] * m[1] - g[1][0] * m[0]) / det];
    for u in [u1, u2] {
        for (k, v) in u.iter_mut().enumerate() {
            let c = grid.center(k);
            *v -= coef[0] * c[0] + coef[1] * c[1];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondVariation {
    /// Logarithmic part.
    pub term_i: f64,
    /// Quadratic part.
    pub term_ii: f64,
    pub total: f64,
    /// First moment of the species 1 perturbation.
    pub moment1: [f64; 2],
}

fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

/// Second variation of the energy for perturbations `u1`, `u2` sampled at
/// cell centres. Double sums are evaluated directly; the log kernel's own
/// cell uses the exact cell average.
pub fn second_variation(grid: &Grid, p: &InteractionParams, u1: &[f64], u2: &[f64]) -> Result<SecondVariation> {
    let n = grid.len();
    if u1.len() != n || u2.len() != n {
        return Err(Error::InvalidParams("perturbation length does not match the grid".into()));
    }
    let area = grid.h() * grid.h();
    let (mass1, m1) = moments(grid, u1);
    let (mass2, m2) = moments(grid, u2);
    let l1: f64 = u1.iter().chain(u2).map(|v| v.abs()).sum::<f64>() * area;
    let lx = grid.half_width * l1 * std::f64::consts::SQRT_2;
    if mass1.abs() > 1e-10 * l1.max(f64::MIN_POSITIVE) || mass2.abs() > 1e-10 * l1.max(f64::MIN_POSITIVE) {
        return Err(Error::ConstraintViolated(format!("masses {mass1:e}, {mass2:e}")));
    }
    let jm = (m1[0] + m2[0]).hypot(m1[1] + m2[1]);
    if jm > 1e-10 * lx.max(f64::MIN_POSITIVE) {
        return Err(Error::ConstraintViolated(format!("joint first moment {jm:e}")));
    }

    let diag = grid.self_cell_log();
    let rows: Vec<[f64; 6]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = grid.center(i);
            let mut acc = [[0.0f64; 2]; 6];
            for j in 0..n {
                let xj = grid.center(j);
                let d2 = (xi[0] - xj[0]).powi(2) + (xi[1] - xj[1]).powi(2);
                let lg = if i == j { diag } else { 0.5 * d2.ln() };
                let terms = [
                    lg * u1[i] * u1[j],
                    lg * u2[i] * u2[j],
                    lg * u1[i] * u2[j],
                    d2 * u1[i] * u1[j],
                    d2 * u2[i] * u2[j],
                    d2 * u1[i] * u2[j],
                ];
                for (a, t) in acc.iter_mut().zip(terms) {
                    let s = a[0] + t;
                    a[1] += if a[0].abs() >= t.abs() { (a[0] - s) + t } else { (t - s) + a[0] };
                    a[0] = s;
                }
            }
            let mut out = [0.0; 6];
            for (o, a) in out.iter_mut().zip(acc) {
                *o = a[0] + a[1];
            }
            out
        })
        .collect();
    let sum = |k: usize| neumaier(rows.iter().map(|r| r[k])) * area * area;
    let (l11, l22, l12, q11, q22, q12) = (sum(0), sum(1), sum(2), sum(3), sum(4), sum(5));
    let term_i = -0.5 * p.a_s() * (l11 + l22) - p.a_c() * l12;
    let term_ii = 0.25 * p.b_s() * (q11 + q22) + 0.5 * p.b_c() * q12;
    Ok(SecondVariation { term_i, term_ii, total: term_i + term_ii, moment1: m1 })
}

/// `(b_c - b_s) |int x u1|^2`, the reduced form of the quadratic part.
pub fn quadratic_part_reduced(p: &InteractionParams, moment1: [f64; 2]) -> f64 {
    (p.b_c() - p.b_s()) * (moment1[0] * moment1[0] + moment1[1] * moment1[1])
}
