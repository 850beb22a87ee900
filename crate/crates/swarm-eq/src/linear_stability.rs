//! Boundary perturbation matrices `Q_m` of the two target states, their
//! spectra, the reduced characteristic polynomials and the mode regions.
//!
//! Perturbation vector ordering is outer circle, gap circle, disk circle,
//! each as `(eps_N, eps_T)`. For the heavy-inside target this is
//! `(eps_0, eps_2, eps_1)` in its own radius labels.

use nalgebra::{DMatrix, Matrix3, Matrix6, Schur};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::equilibria::{build_equilibrium, target_shape, EquilibriumKind};
use crate::error::{Error, Result};
use crate::model_core::{classify_region, to_phase_point, InteractionParams, PhasePoint, RegionId, TAU_REGION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Marginal => "marginal",
        }
    }
}

/// Relative width of the marginal band around `Re lambda = 0`.
pub const MARGINAL_REL: f64 = 1e-9;

fn check_target(kind: EquilibriumKind) -> Result<()> {
    if kind.is_target() {
        Ok(())
    } else {
        Err(Error::UnsupportedKind)
    }
}

/// Masses `(annulus, disk)` for a target kind.
fn target_masses(kind: EquilibriumKind, p: &InteractionParams) -> (f64, f64) {
    if kind == EquilibriumKind::TargetHeavyIn {
        (p.m2(), p.m1())
    } else {
        (p.m1(), p.m2())
    }
}

/// `Q_m` for a target. The heavy-inside matrix is the light-inside one with
/// the two masses exchanged.
pub fn build_q(kind: EquilibriumKind, p: &InteractionParams, m: u32) -> Result<Matrix6<f64>> {
    check_target(kind)?;
    if m == 0 {
        return Err(Error::ZeroMode);
    }
    let cfg = build_equilibrium(kind, p)?;
    if !cfg.exists {
        return Err(Error::EquilibriumMissing(cfg.reason));
    }
    let (m_ann, m_disk) = target_masses(kind, p);
    let t = target_shape(p, m_ann, m_disk);
    let (r0, r1, r2) = (t.r_out, t.r_gap, t.r_disk);
    let (p1, p2) = (t.rho_ann, t.rho_disk);
    let (a_s, a_c, b_s, b_c) = (p.a_s(), p.a_c(), p.b_s(), p.b_c());
    let mut q = Matrix6::zeros();
    if m == 1 {
        q[(0, 0)] = -a_s * PI * p1 + b_s * p1 * PI * r0 * r0;
        q[(0, 2)] = -a_s * p1 * PI * (r1 / r0).powi(3) - b_s * p1 * PI * r1.powi(3) / r0;
        q[(0, 4)] = m_disk * a_c * r2 / r0.powi(3) + m_disk * b_c * r2 / r0;
        q[(1, 0)] = a_s * PI * p1 - b_s * p1 * PI * r0 * r0;
        q[(1, 2)] = -a_s * PI * p1 * (r1 / r0).powi(3) + b_s * p1 * PI * r1.powi(3) / r0;
        q[(1, 4)] = m_disk * a_c * r2 / r0.powi(3) - m_disk * b_c * r2 / r0;
        q[(2, 0)] = -a_s * PI * p1 * r0 / r1 + b_s * p1 * PI * r0.powi(3) / r1;
        q[(2, 2)] = -a_s * PI * p1 - b_s * p1 * PI * r1 * r1;
        q[(2, 4)] = m_disk * a_c * r2 / r1.powi(3) + b_c * m_disk * r2 / r1;
        q[(3, 0)] = a_s * PI * p1 * r0 / r1 - b_s * p1 * PI * r0.powi(3) / r1;
        q[(3, 2)] = -a_s * PI * p1 + b_s * PI * p1 * r1 * r1;
        q[(3, 4)] = m_disk * a_c * r2 / r1.powi(3) - m_disk * b_c * r2 / r1;
        q[(4, 0)] = -a_c * PI * p1 * r0 / r2 + b_c * PI * p1 * r0.powi(3) / r2;
        q[(4, 2)] = a_c * PI * p1 * r1 / r2 - b_c * p1 * PI * r1.powi(3) / r2;
        q[(4, 4)] = -m_ann * b_c;
        q[(5, 0)] = a_c * PI * p1 * r0 / r2 - b_c * p1 * PI * r0.powi(3) / r2;
        q[(5, 2)] = -a_c * PI * p1 * r1 / r2 + b_c * p1 * PI * r1.powi(3) / r2;
        q[(5, 4)] = m_ann * b_c;
    } else {
        let mi = m as i32;
        let up = |x: f64| x.powi(mi + 2);
        let dn = |x: f64| x.powi(mi - 2);
        q[(0, 0)] = -a_s * PI * p1;
        q[(0, 2)] = -a_s * PI * p1 * up(r1 / r0);
        q[(0, 4)] = a_c * PI * p2 * up(r2 / r0);
        q[(1, 0)] = a_s * PI * p1;
        q[(1, 2)] = -a_s * PI * p1 * up(r1 / r0);
        q[(1, 4)] = a_c * PI * p2 * up(r2 / r0);
        q[(2, 0)] = -a_s * PI * p1 * dn(r1 / r0);
        q[(2, 2)] = -a_s * PI * p1;
        q[(2, 4)] = a_c * PI * p2 * up(r2 / r1);
        q[(3, 0)] = a_s * PI * p1 * dn(r1 / r0);
        q[(3, 2)] = -a_s * PI * p1;
        q[(3, 4)] = a_c * PI * p2 * up(r2 / r1);
        q[(4, 0)] = -a_c * PI * p1 * dn(r2 / r0);
        q[(4, 2)] = a_c * PI * p1 * dn(r2 / r1);
        q[(4, 4)] = -a_s * PI * p2;
        q[(5, 0)] = a_c * PI * p1 * dn(r2 / r0);
        q[(5, 2)] = -a_c * PI * p1 * dn(r2 / r1);
        q[(5, 4)] = a_s * PI * p2;
    }
    Ok(q)
}

/// Monic quadratic `lambda^2 + c1 lambda + c0` and its roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadratic {
    pub c1: f64,
    pub c0: f64,
    pub roots: [f64; 2],
}

/// Mode-1 nontrivial factor in units where `scale = b_s M_2`.
pub fn mode1_quadratic(kind: EquilibriumKind, q: &PhasePoint, scale: f64) -> Result<Quadratic> {
    check_target(kind)?;
    let (a, b, m) = (q.a, q.b, q.m);
    let (c1, c0) = if kind == EquilibriumKind::TargetLightIn {
        (scale * (m + 2.0 * b + m * b), -scale * scale * m * (m + 1.0) * (a - b) * (m + b) / (m + a))
    } else {
        (scale * (1.0 + b + 2.0 * m * b), -scale * scale * (m + 1.0) * (a - b) * (1.0 + m * b) / (1.0 + m * a))
    };
    // Discriminant is c1^2 - 4 c0 >= 0 in the existence region.
    let disc = (c1 * c1 - 4.0 * c0).max(0.0).sqrt();
    let big = -0.5 * (c1 + disc);
    let small = if big != 0.0 { c0 / big } else { 0.0 };
    let mut roots = [big, small];
    roots.sort_by(f64::total_cmp);
    Ok(Quadratic { c1, c0, roots })
}

/// Normalized cubic `P(mu)` whose roots are `lambda / (pi a_s rho_ann)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cubic {
    pub m: u32,
    /// `(M + B)/(1 + M B)` for the light-inside target, its reciprocal for heavy-inside.
    pub c: f64,
    /// `A / (M + A)` light-inside, `A M / (1 + A M)` heavy-inside.
    pub ratio: f64,
    pub a: f64,
    /// Coefficients of `mu^2, mu, 1`.
    pub coeffs: [f64; 3],
    /// `pi a_s rho_ann`, the factor converting `mu` back to `lambda`.
    pub lambda_scale: f64,
}

impl Cubic {
    /// Evaluated as `(mu + 1/C)((mu + 1)^2 - r^m) - g A (C/A)^{m-1} (mu + 1)` with
    /// `r` the ratio and `g = 1 - r^m`, which keeps full relative accuracy at
    /// `mu = -1` and `mu = -1/C` even when `r^m` underflows against one.
    pub fn p_of_mu(&self, mu: f64) -> f64 {
        let mi = self.m as i32;
        let rm = self.ratio.powi(mi);
        let inv_c = 1.0 / self.c;
        let s = self.a * (self.c / self.a).powi(mi - 1);
        (mu + inv_c) * ((mu + 1.0).powi(2) - rm) - (1.0 - rm) * s * (mu + 1.0)
    }

    /// Roots in `lambda`, ascending by real part.
    pub fn lambda_roots(&self) -> [Complex64; 3] {
        let [c2, c1, c0] = self.coeffs;
        cubic_roots(c2, c1, c0).map(|r| r * self.lambda_scale)
    }
}

pub fn char_poly_cubic(kind: EquilibriumKind, p: &InteractionParams, m: u32) -> Result<Cubic> {
    check_target(kind)?;
    if m < 2 {
        return Err(Error::InvalidParams(format!("cubic factor needs m >= 2, got {m}")));
    }
    let q = to_phase_point(p);
    let (a, b, mm) = (q.a, q.b, q.m);
    let c_light = (mm + b) / (1.0 + mm * b);
    let (c, ratio) = if kind == EquilibriumKind::TargetLightIn {
        (c_light, a / (mm + a))
    } else {
        (1.0 / c_light, a * mm / (1.0 + a * mm))
    };
    let mi = m as i32;
    let g = 1.0 - ratio.powi(mi);
    let coeffs = [
        2.0 + 1.0 / c,
        2.0 / c + (1.0 - a * (c / a).powi(mi - 1)) * g,
        (1.0 / c) * (1.0 - a * a * (c / a).powi(mi)) * g,
    ];
    let (m_ann, m_disk) = target_masses(kind, p);
    let rho_ann = target_shape(p, m_ann, m_disk).rho_ann;
    Ok(Cubic { m, c, ratio, a, coeffs, lambda_scale: PI * p.a_s() * rho_ann })
}

fn polish(c2: f64, c1: f64, c0: f64, mut z: Complex64) -> Complex64 {
    for _ in 0..3 {
        let f = ((z + c2) * z + c1) * z + c0;
        let d = (3.0 * z + 2.0 * c2) * z + c1;
        if d.norm() == 0.0 {
            break;
        }
        let step = f / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
    }
    z
}

/// Roots of `x^3 + c2 x^2 + c1 x + c0`, ascending by real part.
pub fn cubic_roots(c2: f64, c1: f64, c0: f64) -> [Complex64; 3] {
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2.powi(3) / 27.0 - c2 * c1 / 3.0 + c0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut roots = if disc < 0.0 {
        let r = 2.0 * (-p / 3.0).sqrt();
        let phi = ((3.0 * q / (p * r)).clamp(-1.0, 1.0)).acos() / 3.0;
        [0.0, 1.0, 2.0].map(|k| Complex64::new(r * (phi - 2.0 * PI * k / 3.0).cos() - shift, 0.0))
    } else {
        let s = disc.sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        let t = u + v;
        let x0 = t - shift;
        // Deflate: x^2 + (c2 + x0) x + (c1 + x0 (c2 + x0)).
        let b = c2 + x0;
        let c = c1 + x0 * b;
        let d = b * b - 4.0 * c;
        let (x1, x2) = if d >= 0.0 {
            let sq = d.sqrt();
            let big = -0.5 * (b + b.signum() * sq);
            let other = if big != 0.0 { c / big } else { 0.0 };
            (Complex64::new(big, 0.0), Complex64::new(other, 0.0))
        } else {
            let im = 0.5 * (-d).sqrt();
            (Complex64::new(-0.5 * b, -im), Complex64::new(-0.5 * b, im))
        };
        [Complex64::new(x0, 0.0), x1, x2]
    };
    for r in roots.iter_mut() {
        let z = polish(c2, c1, c0, *r);
        *r = if r.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
    }
    sort_complex(&mut roots);
    roots
}

fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub kind: EquilibriumKind,
    pub m: u32,
    /// Row-major entries.
    pub q: [[f64; 6]; 6],
    pub q_norm: f64,
    pub eigenvalues: Vec<Complex64>,
    pub nontrivial: Vec<Complex64>,
    /// Roots of the reduced quadratic (m = 1) or cubic (m >= 2).
    pub closed_form: Vec<Complex64>,
    /// Largest `|lambda_eig - lambda_closed| / max(|lambda_closed|, 1e-6 |Q|)`.
    pub closed_form_discrepancy: f64,
    pub verdict: Verdict,
}

impl ModeSpectrum {
    pub fn max_real(&self) -> f64 {
        self.nontrivial.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn verdict_of(nontrivial: &[Complex64], q_norm: f64) -> Verdict {
    let band = MARGINAL_REL * q_norm;
    if nontrivial.iter().any(|z| z.re > band) {
        Verdict::Unstable
    } else if nontrivial.iter().all(|z| z.re < -band) {
        Verdict::Stable
    } else {
        Verdict::Marginal
    }
}

fn match_discrepancy(a: &[Complex64], b: &[Complex64], floor: f64) -> f64 {
    // Greedy nearest matching; the sets have at most three elements.
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm() / y.norm().max(floor)))
            .min_by(|u, v| u.1.total_cmp(&v.1))
            .unwrap_or((0, f64::INFINITY));
        if k < used.len() {
            used[k] = true;
        }
        worst = worst.max(d);
    }
    worst
}

/// Eigenvalues from a Schur iteration capped at a fixed number of sweeps.
///
/// Deflation compares subdiagonals against neighbouring diagonal entries, so
/// a cluster of exact zeros with tiny couplings can stall it. The retry
/// shifts the matrix by a fraction of its norm and shifts the result back.
fn eigenvalues_of(a: DMatrix<f64>) -> Result<Vec<Complex64>> {
    const SWEEPS: usize = 2000;
    if let Some(s) = Schur::try_new(a.clone(), f64::EPSILON, SWEEPS) {
        return Ok(s.complex_eigenvalues().iter().copied().collect());
    }
    let n = a.nrows();
    let mut shift = 0.37 * a.norm().max(f64::MIN_POSITIVE);
    for _ in 0..4 {
        let shifted = &a + DMatrix::identity(n, n) * shift;
        if let Some(s) = Schur::try_new(shifted, f64::EPSILON, SWEEPS) {
            return Ok(s.complex_eigenvalues().iter().map(|z| z - shift).collect());
        }
        shift *= -1.9;
    }
    Err(Error::EigenNonConvergence(n))
}

/// Spectrum of `Q_m` with the nontrivial eigenvalues taken from the block
/// coupling the normal amplitudes.
pub fn mode_spectrum(kind: EquilibriumKind, p: &InteractionParams, m: u32) -> Result<ModeSpectrum> {
    let q = build_q(kind, p, m)?;
    let q_norm = q.norm();
    let mut eigenvalues = eigenvalues_of(DMatrix::from_fn(6, 6, |i, j| q[(i, j)]))?;
    sort_complex(&mut eigenvalues);

    let idx = [0usize, 2, 4];
    let qnn = Matrix3::from_fn(|i, j| q[(idx[i], idx[j])]);
    let mut nn = eigenvalues_of(DMatrix::from_fn(3, 3, |i, j| qnn[(i, j)]))?;
    if m == 1 {
        // One structural zero left in the normal block.
        let k = (0..3).min_by(|&i, &j| nn[i].norm().total_cmp(&nn[j].norm())).expect("3");
        nn.remove(k);
    }
    sort_complex(&mut nn);

    let closed_form: Vec<Complex64> = if m == 1 {
        let scale = p.b_s() * p.m2();
        let quad = mode1_quadratic(kind, &to_phase_point(p), scale)?;
        quad.roots.iter().map(|&r| Complex64::new(r, 0.0)).collect()
    } else {
        char_poly_cubic(kind, p, m)?.lambda_roots().to_vec()
    };
    let closed_form_discrepancy = match_discrepancy(&nn, &closed_form, 1e-6 * q_norm);
    let verdict = verdict_of(&nn, q_norm);
    let mut rows = [[0.0; 6]; 6];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = q[(i, j)];
        }
    }
    Ok(ModeSpectrum {
        kind,
        m,
        q: rows,
        q_norm,
        eigenvalues,
        nontrivial: nn,
        closed_form,
        closed_form_discrepancy,
        verdict,
    })
}

/// `B` threshold of `U_m`, `(M A^{2/m} - A)/(M A - A^{2/m})`.
pub fn um_threshold(m: u32, a: f64, mm: f64) -> f64 {
    let e = a.powf(2.0 / m as f64);
    (mm * e - a) / (mm * a - e)
}

/// Upper `A` limit of `U_m`, infinite for `m = 2`.
pub fn um_a_limit(m: u32, mm: f64) -> f64 {
    if m <= 2 {
        f64::INFINITY
    } else {
        mm.powf(m as f64 / (m as f64 - 2.0))
    }
}

/// Existence region of the light-inside target.
pub fn in_light_target_region(q: &PhasePoint) -> bool {
    classify_region(q, TAU_REGION).in_any(&[RegionId::D3, RegionId::D4, RegionId::D5])
}

/// Membership in `U_m`; `U_1` is `D3`.
pub fn region_um(m: u32, q: &PhasePoint) -> bool {
    if m == 1 {
        return classify_region(q, TAU_REGION) == RegionId::D3;
    }
    in_light_target_region(q) && q.a > 1.0 && q.a < um_a_limit(m, q.m) && q.b < um_threshold(m, q.a, q.m)
}

/// Points `(A, B)` along the `U_m` boundary for `A` in `(1, min(limit, a_max))`.
pub fn um_curve(m: u32, mm: f64, a_max: f64, n: usize) -> Vec<(f64, f64)> {
    if m == 1 {
        return (0..n).map(|k| {
            let a = 1.0 + (a_max - 1.0) * k as f64 / (n.max(2) - 1) as f64;
            (a, a)
        }).collect();
    }
    let hi = um_a_limit(m, mm).min(a_max);
    (0..n)
        .map(|k| {
            let a = 1.0 + (hi - 1.0) * k as f64 / (n.max(2) - 1) as f64;
            (a, um_threshold(m, a, mm).max(0.0))
        })
        .collect()
}

pub const DEFAULT_M_MAX: u32 = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub kind: EquilibriumKind,
    pub m_max: u32,
    pub modes: Vec<ModeSpectrum>,
    pub overall: Verdict,
    pub dominant_unstable_mode: Option<u32>,
    /// Whether the phase point lies in `S_{m_max}`, in which case modes
    /// above `m_max` are stable as well.
    pub higher_modes_covered: bool,
}

pub fn stability_report(kind: EquilibriumKind, p: &InteractionParams, m_max: u32) -> Result<StabilityReport> {
    check_target(kind)?;
    if m_max < 2 {
        return Err(Error::InvalidParams(format!("m_max must be >= 2, got {m_max}")));
    }
    let modes: Vec<ModeSpectrum> = (1..=m_max)
        .into_par_iter()
        .map(|m| mode_spectrum(kind, p, m))
        .collect::<Result<_>>()?;
    let overall = if modes.iter().any(|s| s.verdict == Verdict::Unstable) {
        Verdict::Unstable
    } else if modes.iter().all(|s| s.verdict == Verdict::Stable) {
        Verdict::Stable
    } else {
        Verdict::Marginal
    };
    let dominant_unstable_mode = (overall == Verdict::Unstable)
        .then(|| modes.iter().max_by(|x, y| x.max_real().total_cmp(&y.max_real())).map(|s| s.m))
        .flatten();
    let q = to_phase_point(p);
    let higher_modes_covered = kind == EquilibriumKind::TargetLightIn
        && in_light_target_region(&q)
        && !region_um(m_max, &q)
        && overall == Verdict::Stable;
    Ok(StabilityReport { kind, m_max, modes, overall, dominant_unstable_mode, higher_modes_covered })
}

/// Overall verdict predicted from the phase plane alone: the light-inside
/// target is stable exactly on `D4 u D5`, the heavy-inside one nowhere.
pub fn expected_overall(kind: EquilibriumKind, q: &PhasePoint) -> Option<Verdict> {
    let reg = classify_region(q, TAU_REGION);
    if reg.is_boundary() {
        return None;
    }
    match kind {
        EquilibriumKind::TargetLightIn => match reg {
            RegionId::D4 | RegionId::D5 => Some(Verdict::Stable),
            RegionId::D3 => Some(Verdict::Unstable),
            _ => None,
        },
        EquilibriumKind::TargetHeavyIn => {
            reg.in_any(&[RegionId::D2, RegionId::D3, RegionId::D4]).then_some(Verdict::Unstable)
        }
        _ => None,
    }
}
