//! Command-line front end: configuration, overrides, sweeps and file output.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 I/O error. `TWOMODE_THREADS` fixes the worker-thread count.

pub mod config;
pub mod io;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{classify, classify_samples, ClassifyError};
use crate::equilibria::{
    default_seed_grid, normal_mode_frequencies, numeric_fixed_points, symmetric_fixed_points, EquilibriumError,
    FixedPoint, PhaseMode,
};
use crate::integrator::{integrate, IntegrateError};
use crate::modeparams::{compute_two_mode_params, quadrature_error_estimate, ModeError, TwoModeParams};
use crate::model::ModelParams;

pub use config::{Axis, AxisSpec, OutputSpec, RunConfig, SweepSpec, TableFormat};
use io::{PhaseDiagramRow, Summary};

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "TWOMODE_THREADS";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

impl From<IntegrateError> for CliError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::Model(_) | IntegrateError::InvalidConfig(_) => Self::Config(e.to_string()),
            IntegrateError::PoleApproach { .. } | IntegrateError::StepFailure { .. } => Self::Numerical(e.to_string()),
        }
    }
}

impl From<EquilibriumError> for CliError {
    fn from(e: EquilibriumError) -> Self {
        match e {
            EquilibriumError::Model(_) | EquilibriumError::SymmetryViolation(_) => Self::Config(e.to_string()),
            EquilibriumError::NoTransition { .. } | EquilibriumError::NoConvergence { .. } => {
                Self::Numerical(e.to_string())
            }
        }
    }
}

impl From<ModeError> for CliError {
    fn from(e: ModeError) -> Self {
        Self::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "twomode", version, about = "Two-mode dynamics of a binary condensate in a double well")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and label its regime.
    Simulate(RunArgs),
    /// List equilibria with stability verdicts.
    FixedPoints {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Sweep one or two parameters and tabulate stability and regime.
    PhaseDiagram(RunArgs),
    /// Label an existing trajectory table.
    Classify {
        #[command(flatten)]
        run: RunArgs,
        /// Trajectory table with header `t,Z_a,Z_b,phi_a,phi_b,H`.
        #[arg(long)]
        input: PathBuf,
    },
    /// Compute model coefficients from a gridded modes file.
    ModeParams {
        #[arg(long)]
        input: PathBuf,
        /// Output path stem.
        #[arg(long, default_value = "twomode_out")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Zero,
    Pi,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Closed form for symmetric parameters, Newton otherwise.
    Auto,
    Analytic,
    Numeric,
}

/// Config file plus field overrides.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path stem (overrides `output.path`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Sets `Lambda_a` and `Lambda_b`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_b: Option<f64>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "ratio")]
    pub lambda_ab: Option<f64>,
    /// Sets `Lambda_ab = RATIO * Lambda_a` (2.13 when given without a value).
    #[arg(long, num_args = 0..=1, default_missing_value = "2.13")]
    pub ratio: Option<f64>,
    /// Sets `K_a` and `K_b`.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub k_a: Option<f64>,
    #[arg(long)]
    pub k_b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z_b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi_b: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub sample_interval: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl RunArgs {
    /// Loads the config file (or defaults) and applies the overrides.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json(&read_text(path)?)?,
            None => RunConfig::default(),
        };
        self.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&self, cfg: &mut RunConfig) {
        let m = &mut cfg.model;
        if let Some(v) = self.lambda {
            m.lambda_a = v;
            m.lambda_b = v;
        }
        set(&mut m.lambda_a, self.lambda_a);
        set(&mut m.lambda_b, self.lambda_b);
        if let Some(v) = self.lambda_ab {
            m.lambda_ab = v;
            cfg.lambda_ab_ratio = None;
        }
        if let Some(r) = self.ratio {
            cfg.lambda_ab_ratio = Some(r);
        }
        if let Some(v) = self.k {
            m.k_a = v;
            m.k_b = v;
        }
        set(&mut m.k_a, self.k_a);
        set(&mut m.k_b, self.k_b);
        let s = &mut cfg.initial;
        set(&mut s.z_a, self.z_a);
        set(&mut s.z_b, self.z_b);
        set(&mut s.phi_a, self.phi_a);
        set(&mut s.phi_b, self.phi_b);
        set(&mut cfg.integrator.t_end, self.t_end);
        set(&mut cfg.integrator.sample_interval, self.sample_interval);
        if let Some(p) = &self.out {
            cfg.output.path = p.clone();
        }
        if let Some(f) = self.format {
            cfg.output.format = match f {
                FormatArg::Csv => TableFormat::Csv,
                FormatArg::Json => TableFormat::Json,
            };
        }
    }
}

fn set(field: &mut f64, value: Option<f64>) {
    if let Some(v) = value {
        *field = v;
    }
}

/// Applies `TWOMODE_THREADS` to the global thread pool, if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot configure thread pool: {e}")))
}

/// Runs a parsed command and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(&args.resolve()?),
        Command::FixedPoints { run, mode, method } => cmd_fixed_points(&run.resolve()?, *mode, *method),
        Command::PhaseDiagram(args) => cmd_phase_diagram(&args.resolve()?),
        Command::Classify { run, input } => cmd_classify(&run.resolve()?, input),
        Command::ModeParams { input, out } => cmd_mode_params(input, out),
    }
}

/// Parses `args`, runs, prints written paths and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("twomode: {e}");
        return e.exit_code();
    }
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("twomode: {e}");
            e.exit_code()
        }
    }
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let p = cfg.effective_model();
    let traj = integrate(&p, &cfg.initial, &cfg.integrator)?;
    let label = classify(&traj, &cfg.classifier);
    let summary = Summary {
        phase_class: label.as_ref().ok().and_then(|l| l.phase_class()),
        trapping: label.as_ref().ok().map(|l| l.trapping),
        label: label.as_ref().ok().copied(),
        classification_error: label.as_ref().err().map(ClassifyError::to_string),
        samples: traj.len(),
        t_end: cfg.integrator.t_end,
        energy_drift: Some(traj.relative_energy_drift()),
    };
    let table_path = match cfg.output.format {
        TableFormat::Csv => {
            let path = cfg.output.with_extension("csv");
            write_text(&path, &io::trajectory_csv(&traj))?;
            path
        }
        TableFormat::Json => {
            let path = cfg.output.with_extension("json");
            write_text(&path, &to_json(&traj))?;
            path
        }
    };
    let summary_path = cfg.output.with_extension("summary.json");
    write_text(&summary_path, &to_json(&summary))?;
    Ok(vec![table_path, summary_path])
}

/// A fixed point as written by `fixed-points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRecord {
    #[serde(flatten)]
    pub point: FixedPoint,
    /// Where the stability verdict comes from.
    pub stability_method: String,
}

pub fn fixed_points(p: &ModelParams, mode: ModeArg, method: Method) -> Result<Vec<FixedPointRecord>, CliError> {
    let modes: &[PhaseMode] = match mode {
        ModeArg::Zero => &[PhaseMode::Zero],
        ModeArg::Pi => &[PhaseMode::Pi],
        ModeArg::Both => &[PhaseMode::Zero, PhaseMode::Pi],
    };
    let analytic = match method {
        Method::Analytic => true,
        Method::Numeric => false,
        Method::Auto => p.is_symmetric(),
    };
    let mut out = Vec::new();
    for &m in modes {
        let points = if analytic {
            symmetric_fixed_points(p, m)?
        } else {
            numeric_fixed_points(p, m, &default_seed_grid())?.roots
        };
        out.extend(points.into_iter().map(|point| FixedPointRecord {
            stability_method: if point.z_a == 0.0 && point.z_b == 0.0 {
                "jacobian eigenvalues; matches closed-form normal modes".into()
            } else {
                "jacobian eigenvalues (numerical verdict, no closed form)".into()
            },
            point,
        }));
    }
    Ok(out)
}

pub fn cmd_fixed_points(cfg: &RunConfig, mode: ModeArg, method: Method) -> Result<Vec<PathBuf>, CliError> {
    let records = fixed_points(&cfg.effective_model(), mode, method)?;
    let path = cfg.output.with_extension("fixed_points.json");
    write_text(&path, &to_json(&records))?;
    Ok(vec![path])
}

/// One node of a sweep. Pure, so a node computed alone matches the same
/// node inside a full sweep.
pub fn phase_diagram_node(cfg: &RunConfig, sweep: &SweepSpec, a1: f64, a2: Option<f64>) -> Result<PhaseDiagramRow, CliError> {
    let mut p = cfg.model;
    let mut s = cfg.initial;
    sweep.axis1.name.apply(a1, &mut p, &mut s);
    if let (Some(ax), Some(v)) = (&sweep.axis2, a2) {
        ax.name.apply(v, &mut p, &mut s);
    }
    if let Some(r) = cfg.lambda_ab_ratio {
        if !sweep.touches_lambda_ab() {
            p.lambda_ab = r * p.lambda_a;
        }
    }
    p.validate().map_err(|e| CliError::Config(format!("sweep node ({a1}, {a2:?}): {e}")))?;
    let zero_stable = normal_mode_frequencies(&p, PhaseMode::Zero)?.is_stable();
    let pi_stable = normal_mode_frequencies(&p, PhaseMode::Pi)?.is_stable();
    let label = if sweep.simulate {
        s.validate().map_err(|e| CliError::Config(format!("sweep node ({a1}, {a2:?}): {e}")))?;
        match integrate(&p, &s, &cfg.integrator) {
            Ok(traj) => match classify(&traj, &cfg.classifier) {
                Ok(l) => l.trapping.name().to_string(),
                Err(ClassifyError::Ambiguous { .. }) => "Ambiguous".into(),
                Err(e) => return Err(CliError::Config(e.to_string())),
            },
            Err(IntegrateError::PoleApproach { .. }) => "PoleApproach".into(),
            Err(IntegrateError::StepFailure { .. }) => "StepFailure".into(),
            Err(e) => return Err(e.into()),
        }
    } else {
        match (zero_stable, pi_stable) {
            (true, true) => "zero+pi",
            (true, false) => "zero",
            (false, true) => "pi",
            (false, false) => "none",
        }
        .to_string()
    };
    Ok(PhaseDiagramRow {
        axis1: a1,
        axis2: a2,
        zero_stable,
        pi_stable,
        label,
    })
}

pub fn phase_diagram(cfg: &RunConfig) -> Result<Vec<PhaseDiagramRow>, CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("phase-diagram needs a `sweep` section".into()))?;
    sweep
        .nodes()
        .par_iter()
        .map(|&(a1, a2)| phase_diagram_node(cfg, sweep, a1, a2))
        .collect()
}

pub fn cmd_phase_diagram(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let rows = phase_diagram(cfg)?;
    let path = cfg.output.with_extension("phase_diagram.csv");
    write_text(&path, &io::phase_diagram_csv(&rows))?;
    Ok(vec![path])
}

pub fn cmd_classify(cfg: &RunConfig, input: &Path) -> Result<Vec<PathBuf>, CliError> {
    let table = io::parse_trajectory_csv(&read_text(input)?)?;
    let p = cfg.effective_model();
    let label = classify_samples(&table.times, &table.states, Some(&p), &cfg.classifier);
    let summary = Summary {
        phase_class: label.as_ref().ok().and_then(|l| l.phase_class()),
        trapping: label.as_ref().ok().map(|l| l.trapping),
        label: label.as_ref().ok().copied(),
        classification_error: label.as_ref().err().map(ClassifyError::to_string),
        samples: table.times.len(),
        t_end: table.times.last().copied().unwrap_or(0.0),
        energy_drift: None,
    };
    let path = cfg.output.with_extension("summary.json");
    write_text(&path, &to_json(&summary))?;
    Ok(vec![path])
}

pub fn cmd_mode_params(input: &Path, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let modes = io::parse_modes(&read_text(input)?)?;
    let params: TwoModeParams = compute_two_mode_params(&modes)?;
    eprintln!(
        "quadrature error estimate {:e}, orthogonality defect {:e}",
        quadrature_error_estimate(&modes)?,
        modes.orthogonality_defect()
    );
    let spec = OutputSpec {
        path: out.to_path_buf(),
        format: TableFormat::Csv,
    };
    let two_mode = spec.with_extension("two_mode.json");
    let model = spec.with_extension("model.json");
    write_text(&two_mode, &to_json(&params))?;
    write_text(&model, &to_json(&params.to_model_params(modes.f_a, modes.f_b)))?;
    Ok(vec![two_mode, model])
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
