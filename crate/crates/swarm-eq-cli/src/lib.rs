//! Command-line driver: flag parsing, run configuration and artifact emission.

pub mod commands;
pub mod config;
pub mod emit;
pub mod svg;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Instant, SystemTime};
use swarm_eq::equilibria::EquilibriumKind;
use swarm_eq::model_core::{to_phase_point, InteractionParams, PhasePoint};

use config::{InitKind, RunConfig};

pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or out-of-range configuration.
    Config(String),
    Lib(swarm_eq::Error),
    Io(String),
}

impl CliError {
    pub fn config(msg: String) -> Self {
        CliError::Config(msg)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_VALIDATION,
            CliError::Lib(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Lib(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigInvalid",
            CliError::Lib(e) => e.name(),
            CliError::Io(_) => "Io",
        }
    }

    /// One-line JSON record written to standard error.
    pub fn record(&self) -> String {
        let message = match self {
            CliError::Config(m) | CliError::Io(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        };
        json!({ "error": self.name(), "message": message, "exit_code": self.exit_code() }).to_string()
    }
}

impl From<swarm_eq::Error> for CliError {
    fn from(e: swarm_eq::Error) -> Self {
        CliError::Lib(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "swarm-eq", version, about = "Equilibria, stability and particle runs of a two-species aggregation model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a phase point into D1..D6 or a boundary curve.
    Region(Common),
    /// Radii, densities, existence and minimiser checks of the equilibria.
    Equilibrium(KindArgs),
    /// First-variation profiles on a radial grid.
    Lambda(LambdaArgs),
    /// Per-mode spectra and overall verdict of a target equilibrium.
    Stability(StabilityArgs),
    /// Particle run with snapshot and diagnostic output.
    Simulate(SimulateArgs),
    /// Separation in the weak-cross-interaction limit.
    Weakcross(WeakArgs),
    /// Region and verdict raster over an (A, B) grid.
    PhaseDiagram(SweepArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Phase coordinate A = eta a_c / a_s.
    #[arg(short = 'A', value_name = "A", allow_negative_numbers = true, conflicts_with_all = ["a_s", "a_c", "b_s", "b_c", "m1", "m2"])]
    pub phase_a: Option<f64>,
    /// Phase coordinate B = eta b_c / b_s.
    #[arg(short = 'B', value_name = "B", allow_negative_numbers = true, conflicts_with_all = ["a_s", "a_c", "b_s", "b_c", "m1", "m2"])]
    pub phase_b: Option<f64>,
    /// Mass ratio M = M1 / M2.
    #[arg(short = 'M', value_name = "M", allow_negative_numbers = true, conflicts_with_all = ["a_s", "a_c", "b_s", "b_c", "m1", "m2"])]
    pub phase_m: Option<f64>,
    /// Self repulsion strength.
    #[arg(long, allow_negative_numbers = true)]
    pub a_s: Option<f64>,
    /// Cross repulsion strength.
    #[arg(long, allow_negative_numbers = true)]
    pub a_c: Option<f64>,
    /// Self attraction strength.
    #[arg(long, allow_negative_numbers = true)]
    pub b_s: Option<f64>,
    /// Cross attraction strength.
    #[arg(long, allow_negative_numbers = true)]
    pub b_c: Option<f64>,
    /// Mass of species 1 (the heavier).
    #[arg(long, allow_negative_numbers = true)]
    pub m1: Option<f64>,
    /// Mass of species 2.
    #[arg(long, allow_negative_numbers = true)]
    pub m2: Option<f64>,
    /// Cross-interaction strength.
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Write artifacts, config.json and metadata.json here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Also emit SVG figures (needs --out-dir).
    #[arg(long)]
    pub svg: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct KindArgs {
    #[command(flatten)]
    pub common: Common,
    /// target-light, target-heavy, overlap-light or overlap-heavy.
    #[arg(long)]
    pub kind: Option<EquilibriumKind>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct LambdaArgs {
    #[command(flatten)]
    pub k: KindArgs,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub k: KindArgs,
    #[arg(long)]
    pub m_max: Option<u32>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub k: KindArgs,
    /// Total particle count.
    #[arg(short = 'N', long = "particles")]
    pub n: Option<usize>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// equilibrium or random-disk.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub dt_max: Option<f64>,
    #[arg(long)]
    pub diag_every: Option<f64>,
    #[arg(long)]
    pub snapshot_every: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct WeakArgs {
    #[command(flatten)]
    pub common: Common,
    /// Solve for a single A/B instead of emitting the curve.
    #[arg(long, allow_negative_numbers = true)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub ratio_min: Option<f64>,
    #[arg(long)]
    pub ratio_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Run particle simulations at the overlay ratios.
    #[arg(long)]
    pub overlay: bool,
    #[arg(long, value_delimiter = ',')]
    pub overlay_ratios: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub overlay_masses: Option<Vec<f64>>,
    #[arg(long)]
    pub overlay_n: Option<usize>,
    #[arg(long)]
    pub overlay_t_end: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Cells per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub a_max: Option<f64>,
    #[arg(long)]
    pub b_max: Option<f64>,
    #[arg(long)]
    pub m_max: Option<u32>,
}

fn set<T>(dst: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *dst = v;
    }
}

impl Common {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(eta) = self.eta {
            cfg.params = cfg.params.with_eta(eta)?;
        }
        let p = cfg.params;
        let eta = p.eta();
        if self.phase_a.is_some() || self.phase_b.is_some() || self.phase_m.is_some() {
            // -A and -B are the effective ratios, cross coefficients already scaled by eta.
            let q = to_phase_point(&p);
            let a = self.phase_a.unwrap_or(q.a);
            let b = self.phase_b.unwrap_or(q.b);
            let m = self.phase_m.unwrap_or(q.m);
            PhasePoint::new(a, b, m)?;
            cfg.params = InteractionParams::from_phase(a / eta, b / eta, m)?.with_eta(eta)?;
        }
        let physical = [self.a_s, self.a_c, self.b_s, self.b_c, self.m1, self.m2];
        if physical.iter().any(Option::is_some) {
            cfg.params = InteractionParams::new(
                self.a_s.unwrap_or(p.a_s()),
                self.a_c.unwrap_or(p.a_c_raw()),
                self.b_s.unwrap_or(p.b_s()),
                self.b_c.unwrap_or(p.b_c_raw()),
                self.m1.unwrap_or(p.m1()),
                self.m2.unwrap_or(p.m2()),
            )?
            .with_eta(eta)?;
        }
        if self.out_dir.is_some() {
            cfg.output.out_dir = self.out_dir.clone();
        }
        cfg.output.svg |= self.svg;
        Ok(())
    }
}

impl KindArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        self.common.apply(cfg)?;
        if self.kind.is_some() {
            cfg.kind = self.kind;
        }
        Ok(())
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Region(_) => "region",
            Command::Equilibrium(_) => "equilibrium",
            Command::Lambda(_) => "lambda",
            Command::Stability(_) => "stability",
            Command::Simulate(_) => "simulate",
            Command::Weakcross(_) => "weakcross",
            Command::PhaseDiagram(_) => "phase-diagram",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Region(c) => c,
            Command::Equilibrium(a) => &a.common,
            Command::Lambda(a) => &a.k.common,
            Command::Stability(a) => &a.k.common,
            Command::Simulate(a) => &a.k.common,
            Command::Weakcross(a) => &a.common,
            Command::PhaseDiagram(a) => &a.common,
        }
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.common().config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        match self {
            Command::Region(c) => c.apply(&mut cfg)?,
            Command::Equilibrium(a) => a.apply(&mut cfg)?,
            Command::Lambda(a) => {
                a.k.apply(&mut cfg)?;
                if a.r_max.is_some() {
                    cfg.lambda.r_max = a.r_max;
                }
                set(&mut cfg.lambda.points, a.points);
            }
            Command::Stability(a) => {
                a.k.apply(&mut cfg)?;
                set(&mut cfg.m_max, a.m_max);
            }
            Command::Simulate(a) => {
                a.k.apply(&mut cfg)?;
                let s = &mut cfg.sim;
                set(&mut s.n, a.n);
                if a.n.is_some() {
                    // A new total resets any explicit split from the file.
                    (s.n1, s.n2) = (None, None);
                }
                if a.n1.is_some() {
                    s.n1 = a.n1;
                }
                if a.n2.is_some() {
                    s.n2 = a.n2;
                }
                set(&mut s.seed, a.seed);
                set(&mut s.t_end, a.t_end);
                if let Some(init) = &a.init {
                    s.init = match init.as_str() {
                        "equilibrium" => InitKind::Equilibrium,
                        "random-disk" => InitKind::RandomDisk,
                        other => return Err(CliError::config(format!("unknown init {other:?}"))),
                    };
                }
                set(&mut s.controls.dt_max, a.dt_max);
                set(&mut s.controls.diag_every, a.diag_every);
                if a.snapshot_every.is_some() {
                    s.controls.snapshot_every = a.snapshot_every;
                }
            }
            Command::Weakcross(a) => {
                a.common.apply(&mut cfg)?;
                let w = &mut cfg.weak;
                if a.ratio.is_some() {
                    w.ratio = a.ratio;
                }
                set(&mut w.ratio_min, a.ratio_min);
                set(&mut w.ratio_max, a.ratio_max);
                set(&mut w.points, a.points);
                w.overlay |= a.overlay;
                set(&mut w.overlay_ratios, a.overlay_ratios.clone());
                set(&mut w.overlay_masses, a.overlay_masses.clone());
                set(&mut w.overlay_n, a.overlay_n);
                set(&mut w.overlay_t_end, a.overlay_t_end);
                set(&mut cfg.sim.seed, a.seed);
            }
            Command::PhaseDiagram(a) => {
                a.common.apply(&mut cfg)?;
                set(&mut cfg.sweep.n, a.grid);
                set(&mut cfg.sweep.a_max, a.a_max);
                set(&mut cfg.sweep.b_max, a.b_max);
                set(&mut cfg.m_max, a.m_max);
            }
        }
        cfg.validate()?;
        if cfg.output.svg && cfg.output.out_dir.is_none() {
            return Err(CliError::config("--svg needs --out-dir".into()));
        }
        Ok(cfg)
    }

    pub fn execute(&self, cfg: &RunConfig) -> Result<emit::Output, CliError> {
        match self {
            Command::Region(_) => commands::region(cfg),
            Command::Equilibrium(_) => commands::equilibrium(cfg),
            Command::Lambda(_) => commands::lambda(cfg),
            Command::Stability(_) => commands::stability(cfg),
            Command::Simulate(_) => commands::simulate(cfg),
            Command::Weakcross(_) => commands::weakcross(cfg),
            Command::PhaseDiagram(_) => commands::phase_diagram(cfg),
        }
    }
}

/// Cap the global worker pool from `SWARM_EQ_THREADS`.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SWARM_EQ_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("SWARM_EQ_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(e.to_string()))
}

/// Run one parsed invocation, printing to stdout and stderr. Returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    match run_inner(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}

fn run_inner(cli: &Cli) -> Result<(), CliError> {
    init_threads()?;
    let started = SystemTime::now();
    let clock = Instant::now();
    let cfg = cli.command.resolve()?;
    let out = cli.command.execute(&cfg)?;
    let meta = emit::Metadata::new(cli.command.name(), &cfg, started, clock.elapsed());
    let text = match &cfg.output.out_dir {
        Some(dir) => {
            emit::write_all(dir, &out, &cfg, &meta)?;
            pretty(&out.summary)
        }
        None => {
            eprintln!("{}", json!({ "metadata": meta }));
            match out.primary {
                Some((_, table)) => table,
                None => pretty(&out.summary),
            }
        }
    };
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        // A closed pipe (`| head`) is not a failure of the run.
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
        _ => Ok(()),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod book_cli {}
