//! Radially symmetric equilibria: targets (disk inside an annulus) and
//! overlaps (coexistence disk inside a one-species annulus).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::disk::{self, Layer};
use crate::error::{Error, Result};
use crate::model_core::{coexist_pair, InteractionParams};

/// Relative gap below which touching radii are reported as degenerate.
pub const TOUCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    /// Species 2 on a disk, species 1 on a surrounding annulus.
    TargetLightIn,
    /// Species 1 on a disk, species 2 on a surrounding annulus.
    TargetHeavyIn,
    /// Both species on a disk, species 1 alone on the annulus around it.
    OverlapLightIn,
    /// Both species on a disk, species 2 alone on the annulus around it.
    OverlapHeavyIn,
}

impl EquilibriumKind {
    pub const ALL: [EquilibriumKind; 4] = [
        EquilibriumKind::TargetLightIn,
        EquilibriumKind::TargetHeavyIn,
        EquilibriumKind::OverlapLightIn,
        EquilibriumKind::OverlapHeavyIn,
    ];

    pub fn is_target(self) -> bool {
        matches!(self, EquilibriumKind::TargetLightIn | EquilibriumKind::TargetHeavyIn)
    }

    /// Species sitting in the central disk alone (targets) or only in the
    /// core (overlaps).
    pub fn inner_species(self) -> usize {
        match self {
            EquilibriumKind::TargetLightIn | EquilibriumKind::OverlapLightIn => 2,
            EquilibriumKind::TargetHeavyIn | EquilibriumKind::OverlapHeavyIn => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EquilibriumKind::TargetLightIn => "target-light",
            EquilibriumKind::TargetHeavyIn => "target-heavy",
            EquilibriumKind::OverlapLightIn => "overlap-light",
            EquilibriumKind::OverlapHeavyIn => "overlap-heavy",
        }
    }
}

impl std::str::FromStr for EquilibriumKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        EquilibriumKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown equilibrium kind {s:?}")))
    }
}

/// Annulus `r_in <= |x| < r_out` with constant densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Subdomain {
    pub r_in: f64,
    pub r_out: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl Subdomain {
    pub fn area(&self) -> f64 {
        PI * (self.r_out * self.r_out - self.r_in * self.r_in)
    }

    pub fn rho(&self, species: usize) -> f64 {
        if species == 1 {
            self.rho1
        } else {
            self.rho2
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumConfig {
    pub kind: EquilibriumKind,
    /// Targets: `[inner disk, gap, outer]`. Overlaps: `[core, outer]`.
    pub radii: Vec<f64>,
    /// Consecutive annuli from the centre out, gaps included.
    pub subdomains: Vec<Subdomain>,
    pub params: InteractionParams,
    pub exists: bool,
    pub reason: String,
    /// Inner disk touches the annulus (target) within [`TOUCH_TOL`].
    pub degenerate: bool,
}

/// Target radii and densities in terms of the annulus mass and the disk mass.
pub(crate) struct TargetShape {
    pub r_disk: f64,
    pub r_gap: f64,
    pub r_out: f64,
    pub rho_ann: f64,
    pub rho_disk: f64,
}

pub(crate) fn target_shape(p: &InteractionParams, m_ann: f64, m_disk: f64) -> TargetShape {
    let (a_s, b_s, a_c, b_c) = (p.a_s(), p.b_s(), p.a_c(), p.b_c());
    TargetShape {
        r_disk: (a_s * m_disk / (b_c * m_ann + b_s * m_disk)).sqrt(),
        r_gap: (a_c * m_disk / (b_s * m_ann + b_c * m_disk)).sqrt(),
        r_out: ((a_s * m_ann + a_c * m_disk) / (b_s * m_ann + b_c * m_disk)).sqrt(),
        rho_ann: (b_s * m_ann + b_c * m_disk) / (PI * a_s),
        rho_disk: (b_c * m_ann + b_s * m_disk) / (PI * a_s),
    }
}

fn build_target(kind: EquilibriumKind, p: &InteractionParams) -> EquilibriumConfig {
    let heavy = kind == EquilibriumKind::TargetHeavyIn;
    let (m_ann, m_disk) = if heavy { (p.m2(), p.m1()) } else { (p.m1(), p.m2()) };
    let t = target_shape(p, m_ann, m_disk);
    let (core, ring) = if heavy { ((t.rho_disk, 0.0), (0.0, t.rho_ann)) } else { ((0.0, t.rho_disk), (t.rho_ann, 0.0)) };
    let subdomains = vec![
        Subdomain { r_in: 0.0, r_out: t.r_disk, rho1: core.0, rho2: core.1 },
        Subdomain { r_in: t.r_disk, r_out: t.r_gap, rho1: 0.0, rho2: 0.0 },
        Subdomain { r_in: t.r_gap, r_out: t.r_out, rho1: ring.0, rho2: ring.1 },
    ];
    let gap = (t.r_gap - t.r_disk) / t.r_gap;
    let degenerate = gap.abs() <= TOUCH_TOL;
    let exists = gap >= -TOUCH_TOL;
    let reason = if exists {
        if degenerate { "inner disk touches the annulus".into() } else { "radii ordered".into() }
    } else {
        format!("inner disk radius {} exceeds annulus inner radius {}", t.r_disk, t.r_gap)
    };
    EquilibriumConfig {
        kind,
        radii: vec![t.r_disk, t.r_gap, t.r_out],
        subdomains,
        params: *p,
        exists,
        reason,
        degenerate,
    }
}

fn build_overlap(kind: EquilibriumKind, p: &InteractionParams) -> Result<EquilibriumConfig> {
    let heavy = kind == EquilibriumKind::OverlapHeavyIn;
    let (a_s, b_s, a_c, b_c) = (p.a_s(), p.b_s(), p.a_c(), p.b_c());
    // `in` lives only in the core, `ann` in the core and the outer annulus.
    let (m_in, m_ann) = if heavy { (p.m1(), p.m2()) } else { (p.m2(), p.m1()) };
    let (c1, c2) = coexist_pair(p)?;
    let (rho_in_core, rho_ann_core) = if heavy { (c1, c2) } else { (c2, c1) };
    let den = a_s * a_s - a_c * a_c;
    let s = a_s * b_s - a_c * b_c;
    let x = a_s * b_c - a_c * b_s;
    let r_core2 = den * m_in / (s * m_in + x * m_ann);
    let r_out2 = (a_s * m_ann + a_c * m_in) / (b_s * m_ann + b_c * m_in);
    let rho_ann_alone = (b_s * m_ann + b_c * m_in) / (PI * a_s);
    let r_core = r_core2.max(0.0).sqrt();
    let r_out = r_out2.sqrt();

    let (reason, exists) = if !(rho_in_core > 0.0 && rho_ann_core > 0.0) {
        (format!("coexistence densities ({c1}, {c2}) not both positive"), false)
    } else if !(r_core2 > 0.0) || !r_core2.is_finite() {
        ("core radius squared not positive".to_string(), false)
    } else if r_core >= r_out {
        (format!("core radius {r_core} not below outer radius {r_out}"), false)
    } else {
        ("radii ordered, densities positive".to_string(), true)
    };

    let (core, ring) = if heavy {
        ((rho_in_core, rho_ann_core), (0.0, rho_ann_alone))
    } else {
        ((rho_ann_core, rho_in_core), (rho_ann_alone, 0.0))
    };
    Ok(EquilibriumConfig {
        kind,
        radii: vec![r_core, r_out],
        subdomains: vec![
            Subdomain { r_in: 0.0, r_out: r_core, rho1: core.0, rho2: core.1 },
            Subdomain { r_in: r_core, r_out, rho1: ring.0, rho2: ring.1 },
        ],
        params: *p,
        exists,
        reason,
        degenerate: false,
    })
}

/// Construct the ansatz of `kind` and decide whether it exists.
pub fn build_equilibrium(kind: EquilibriumKind, p: &InteractionParams) -> Result<EquilibriumConfig> {
    if kind.is_target() {
        Ok(build_target(kind, p))
    } else {
        build_overlap(kind, p)
    }
}

impl EquilibriumConfig {
    pub fn outer_radius(&self) -> f64 {
        *self.radii.last().expect("radii")
    }

    /// Density of `species` as a signed stack of centred disks.
    pub fn layers(&self, species: usize) -> Vec<Layer> {
        let mut out = Vec::new();
        let n = self.subdomains.len();
        for (k, sd) in self.subdomains.iter().enumerate() {
            let next = if k + 1 < n { self.subdomains[k + 1].rho(species) } else { 0.0 };
            let jump = sd.rho(species) - next;
            if jump != 0.0 && sd.r_out > 0.0 {
                out.push(Layer { radius: sd.r_out, density: jump });
            }
        }
        out
    }

    /// Radial intervals where `species` has positive density.
    pub fn support(&self, species: usize) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for sd in &self.subdomains {
            if sd.rho(species) > 0.0 && sd.r_out > sd.r_in {
                match out.last_mut() {
                    Some(last) if last.1 == sd.r_in => last.1 = sd.r_out,
                    _ => out.push((sd.r_in, sd.r_out)),
                }
            }
        }
        out
    }

    /// Total mass of `species` from the stored densities.
    pub fn mass(&self, species: usize) -> f64 {
        self.subdomains.iter().map(|s| s.rho(species) * s.area()).sum()
    }

    /// Radial velocity of `species` at distance `r` from the centre.
    pub fn velocity(&self, species: usize, r: f64) -> f64 {
        let p = &self.params;
        let other = 3 - species;
        -disk::potential_grad(&self.layers(species), p.a_s(), p.b_s(), r)
            - disk::potential_grad(&self.layers(other), p.a_c(), p.b_c(), r)
    }

    /// Typical size of one velocity term, used to make residuals relative.
    pub fn force_scale(&self) -> f64 {
        let p = &self.params;
        let r = self.outer_radius();
        let m = p.m1() + p.m2();
        (p.a_s() + p.a_c()) * m / r + (p.b_s() + p.b_c()) * m * r
    }
}

/// Relative velocity magnitude `|v| / force_scale` of every species present
/// at each sample radius.
pub fn velocity_residual(cfg: &EquilibriumConfig, sample_radii: &[f64]) -> Result<Vec<f64>> {
    if !cfg.exists {
        return Err(Error::EquilibriumMissing(cfg.reason.clone()));
    }
    let scale = cfg.force_scale();
    sample_radii
        .iter()
        .map(|&r| {
            let sd = cfg
                .subdomains
                .iter()
                .find(|s| r >= s.r_in && r <= s.r_out && (s.rho1 > 0.0 || s.rho2 > 0.0))
                .ok_or(Error::SampleOutsideSupport(r))?;
            let mut worst: f64 = 0.0;
            for sp in [1, 2] {
                if sd.rho(sp) > 0.0 {
                    worst = worst.max(cfg.velocity(sp, r).abs() / scale);
                }
            }
            Ok(worst)
        })
        .collect()
}
