use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use swarm_eq::equilibria::EquilibriumKind;
use swarm_eq::linear_stability::DEFAULT_M_MAX;
use swarm_eq::model_core::InteractionParams;
use swarm_eq::particle_sim::RunControls;

use crate::CliError;

/// Everything a run needs. Each subcommand reads its own block and ignores
/// the rest, so one file can drive several commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: InteractionParams,
    pub kind: Option<EquilibriumKind>,
    pub m_max: u32,
    pub lambda: LambdaBlock,
    pub sim: SimBlock,
    pub weak: WeakBlock,
    pub sweep: SweepBlock,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LambdaBlock {
    /// Upper end of the radial grid; `None` means three outer radii.
    pub r_max: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    /// Sample the equilibrium of `kind`.
    Equilibrium,
    /// Independent uniform disks of radius `init_radius`.
    RandomDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimBlock {
    /// Total particle count, split by mass unless `n1`/`n2` are given.
    pub n: usize,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub seed: u64,
    pub t_end: f64,
    pub init: InitKind,
    pub init_radius: f64,
    pub controls: RunControls,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeakBlock {
    /// Single ratio `A/B` to solve; the curve is emitted when absent.
    pub ratio: Option<f64>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub points: usize,
    pub overlay: bool,
    pub overlay_ratios: Vec<f64>,
    pub overlay_masses: Vec<f64>,
    pub overlay_eta: f64,
    pub overlay_n: usize,
    pub overlay_t_end: f64,
    pub overlay_dt_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepBlock {
    /// Cells per axis.
    pub n: usize,
    pub a_max: f64,
    pub b_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub out_dir: Option<PathBuf>,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: InteractionParams::from_phase(3.0, 3.5, 2.0).expect("default phase point"),
            kind: None,
            m_max: DEFAULT_M_MAX,
            lambda: LambdaBlock::default(),
            sim: SimBlock::default(),
            weak: WeakBlock::default(),
            sweep: SweepBlock::default(),
            output: OutputBlock::default(),
        }
    }
}

impl Default for LambdaBlock {
    fn default() -> Self {
        LambdaBlock { r_max: None, points: 400 }
    }
}

impl Default for SimBlock {
    fn default() -> Self {
        SimBlock {
            n: 200,
            n1: None,
            n2: None,
            seed: 0,
            t_end: 50.0,
            init: InitKind::Equilibrium,
            init_radius: 1.0,
            controls: RunControls { snapshot_every: Some(10.0), ..RunControls::default() },
        }
    }
}

impl Default for WeakBlock {
    fn default() -> Self {
        WeakBlock {
            ratio: None,
            ratio_min: 0.5,
            ratio_max: 8.0,
            points: 200,
            overlay: false,
            overlay_ratios: vec![0.5, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0],
            overlay_masses: vec![1.0, 2.0],
            overlay_eta: 0.05,
            overlay_n: 200,
            overlay_t_end: 3000.0,
            overlay_dt_max: 0.2,
        }
    }
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock { n: 200, a_max: 5.0, b_max: 5.0 }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Range checks on the run controls; parameter checks happen on parse.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::config(what.to_string()));
        if self.m_max < 2 {
            return bad("m_max must be >= 2");
        }
        if self.lambda.points < 2 || self.lambda.r_max.is_some_and(|r| !(r.is_finite() && r > 0.0)) {
            return bad("lambda needs points >= 2 and a positive r_max");
        }
        let s = &self.sim;
        if s.n < 2 || s.n1 == Some(0) || s.n2 == Some(0) {
            return bad("simulation needs at least one particle per species");
        }
        if !(s.t_end.is_finite() && s.t_end >= 0.0) || !(s.init_radius.is_finite() && s.init_radius > 0.0) {
            return bad("t_end must be >= 0 and init_radius > 0");
        }
        let c = &s.controls;
        if !(c.dt_init > 0.0 && c.dt_max > 0.0 && c.diag_every > 0.0 && c.max_disp > 0.0 && c.grow_disp > 0.0)
            || c.snapshot_every.is_some_and(|x| !(x > 0.0))
        {
            return bad("run controls must be positive");
        }
        let w = &self.weak;
        if w.ratio.is_some_and(|r| !(r.is_finite() && r > 0.0)) {
            return bad("ratio must be finite and > 0");
        }
        if !(w.ratio_min > 0.0 && w.ratio_max > w.ratio_min && w.ratio_max.is_finite()) || w.points < 2 {
            return bad("curve needs 0 < ratio_min < ratio_max and points >= 2");
        }
        if w.overlay_ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) || w.overlay_masses.iter().any(|m| !(*m >= 1.0)) {
            return bad("overlay ratios must be > 0 and masses >= 1");
        }
        if !(w.overlay_eta > 0.0 && w.overlay_eta <= 1.0) || w.overlay_n < 20 || !(w.overlay_t_end >= 0.0) || !(w.overlay_dt_max > 0.0) {
            return bad("overlay needs eta in (0, 1], n >= 20, t_end >= 0 and dt_max > 0");
        }
        let g = &self.sweep;
        if g.n == 0 || !(g.a_max > 0.0 && g.b_max > 0.0 && g.a_max.is_finite() && g.b_max.is_finite()) {
            return bad("sweep needs n >= 1 and positive finite axes");
        }
        Ok(())
    }
}
