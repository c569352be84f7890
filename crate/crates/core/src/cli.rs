//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when `verify` finds a violated bound, 2 on bad
//! flags, 3 on file or parse errors, 4 on integration failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::constants::{l1_distance, GrowthConstants};
use crate::error::Error;
use crate::experiments::{convergence_sweep, sample_ball, verify_instance, StudyParams};
use crate::integrate::{integrate_switched, integrate_wide, IntegratorConfig, DEFAULT_TOL};
use crate::model::{weights, SwitchSchedule, WideField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Integrate both systems from one initial condition and write their trajectories.
    Simulate,
    /// Print the growth constants and the error bound for N switches.
    Bound,
    /// Print the smallest N whose error bound is at most eps.
    MinSwitches,
    /// Measure terminal errors over a list of N and write the sweep CSV.
    Sweep,
    /// Check velocity, radius and error bounds on sampled trajectories.
    Verify,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "narrow-node", version, about = "Switched narrow neural ODEs versus wide shallow neural ODEs")]
pub struct CliConfig {
    pub command: Command,
    /// JSON weight file of the wide field.
    #[arg(long)]
    pub weights: PathBuf,
    /// Radius of the L1 ball of initial conditions.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Time horizon.
    #[arg(long = "T", default_value_t = 1.0)]
    pub horizon: f64,
    /// Number of switching periods.
    #[arg(long = "N")]
    pub switches: Option<usize>,
    /// Comma-separated, strictly increasing switch counts.
    #[arg(long = "N-list", value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Target error for min-switches.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (sweep) or file stem (simulate writes <stem>.wide.csv and <stem>.switched.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use fixed-step RK4 with this step instead of the adaptive integrator.
    #[arg(long)]
    pub step: Option<f64>,
    /// Absolute and relative tolerance of the adaptive integrator.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Initial condition for simulate; defaults to a seeded sample from the r-ball.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    File(Error),
    #[error(transparent)]
    Integration(Error),
    #[error("verification failed")]
    Verification,
    #[error("write failed: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification => 1,
            CliError::Usage(_) => 2,
            CliError::File(_) | CliError::Output(_) => 3,
            CliError::Integration(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_file_error() {
            CliError::File(e)
        } else if e.is_integration_failure() {
            CliError::Integration(e)
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl CliConfig {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(usage(format!("--r must be nonnegative, got {}", self.r)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(usage(format!("--T must be positive, got {}", self.horizon)));
        }
        if self.switches == Some(0) {
            return Err(usage("--N must be at least 1"));
        }
        if let Some(eps) = self.eps {
            if eps.is_nan() || eps <= 0.0 {
                return Err(usage(format!("--eps must be positive, got {eps}")));
            }
        }
        if self.samples == 0 {
            return Err(usage("--samples must be at least 1"));
        }
        if let Some(h) = self.step {
            if !(h.is_finite() && h > 0.0) {
                return Err(usage(format!("--step must be positive, got {h}")));
            }
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(usage(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    fn integrator(&self) -> IntegratorConfig {
        match self.step {
            Some(h) => IntegratorConfig::fixed(h),
            None => IntegratorConfig::adaptive(self.tol),
        }
    }

    fn switches(&self) -> Result<usize, CliError> {
        self.switches.ok_or_else(|| usage(format!("{:?} requires --N", self.command)))
    }

    fn n_values(&self) -> Result<Vec<usize>, CliError> {
        match (&self.n_list, self.switches) {
            (Some(list), _) => Ok(list.clone()),
            (None, Some(n)) => Ok(vec![n]),
            (None, None) => Err(usage(format!("{:?} requires --N-list or --N", self.command))),
        }
    }

    fn study(&self) -> StudyParams {
        StudyParams { r: self.r, horizon: self.horizon, samples: self.samples, seed: self.seed, cfg: self.integrator() }
    }
}

fn join(x: &[f64]) -> String {
    x.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::File(Error::Io { path: path.to_owned(), source }))
}

fn simulate(cfg: &CliConfig, field: WideField, out: &mut dyn Write) -> Result<(), CliError> {
    let schedule = SwitchSchedule::new(field, cfg.horizon, cfg.switches()?)?;
    let field = schedule.field();
    let x0 = match &cfg.x0 {
        Some(x0) => x0.clone(),
        None => sample_ball(cfg.r, field.dim(), 1, cfg.seed).remove(0),
    };
    let integrator = cfg.integrator();
    let wide = integrate_wide(field, &x0, cfg.horizon, &integrator)?;
    let switched = integrate_switched(&schedule, &x0, &integrator)?;
    if let Some(path) = &cfg.out {
        for (suffix, traj) in [("wide.csv", &wide), ("switched.csv", &switched)] {
            let p = path.with_extension(suffix);
            let mut w = create(&p)?;
            traj.write_csv(&mut w)?;
            w.flush()?;
            writeln!(out, "wrote={}", p.display())?;
        }
    }
    writeln!(out, "x0={}", join(&x0))?;
    writeln!(out, "wide_endpoint={}", join(wide.endpoint()))?;
    writeln!(out, "switched_endpoint={}", join(switched.endpoint()))?;
    writeln!(out, "terminal_error={}", l1_distance(wide.endpoint(), switched.endpoint()))?;
    Ok(())
}

fn bound(cfg: &CliConfig, field: &WideField, out: &mut dyn Write) -> Result<(), CliError> {
    let n = cfg.switches()?;
    let gc = GrowthConstants::from_field(field, cfg.r, cfg.horizon)?;
    writeln!(out, "c={}", gc.c())?;
    writeln!(out, "L={}", gc.l())?;
    writeln!(out, "K_tilde={}", gc.k_tilde())?;
    writeln!(out, "X={}", gc.velocity_bound(cfg.horizon))?;
    writeln!(out, "R={}", gc.trajectory_radius(cfg.horizon))?;
    writeln!(out, "N={n}")?;
    writeln!(out, "bound={}", gc.error_bound(n))?;
    Ok(())
}

fn min_switches(cfg: &CliConfig, field: &WideField, out: &mut dyn Write) -> Result<(), CliError> {
    let eps = cfg.eps.ok_or_else(|| usage("min-switches requires --eps"))?;
    let gc = GrowthConstants::from_field(field, cfg.r, cfg.horizon)?;
    let n = gc.min_switches(eps)?;
    writeln!(out, "N={n}")?;
    writeln!(out, "bound={}", gc.error_bound(n))?;
    Ok(())
}

fn sweep(cfg: &CliConfig, field: &WideField, out: &mut dyn Write) -> Result<(), CliError> {
    let report = convergence_sweep(field, &cfg.n_values()?, &cfg.study())?;
    match &cfg.out {
        Some(path) => {
            let mut w = create(path)?;
            report.write_csv(&mut w)?;
            w.flush()?;
            writeln!(out, "wrote={}", path.display())?;
        }
        None => report.write_csv(&mut *out)?,
    }
    Ok(())
}

fn verify(cfg: &CliConfig, field: &WideField, out: &mut dyn Write) -> Result<(), CliError> {
    let report = verify_instance(field, &cfg.n_values()?, &cfg.study())?;
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };
    let b = &report.bounds;
    writeln!(out, "instance={}", report.sweep.instance_digest)?;
    writeln!(
        out,
        "velocity={} worst_ratio={} nodes={}",
        verdict(b.velocity.passed()),
        b.velocity.worst_ratio,
        b.velocity.nodes
    )?;
    writeln!(
        out,
        "radius={} worst_ratio={} nodes={}",
        verdict(b.radius.passed()),
        b.radius.worst_ratio,
        b.radius.nodes
    )?;
    let violations = report.sweep.violations();
    writeln!(out, "bound_dominance={} violations={violations}", verdict(violations == 0))?;
    for ((n, e), bd) in
        report.sweep.n_values.iter().zip(&report.sweep.max_empirical_error).zip(&report.sweep.theoretical_bound)
    {
        writeln!(out, "N={n} max_empirical_error={e} theoretical_bound={bd}")?;
    }
    writeln!(out, "result={}", verdict(report.passed()))?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

/// Executes one parsed invocation, writing labelled results to `out`.
pub fn run(cfg: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    cfg.validate()?;
    let field = weights::load(&cfg.weights)?;
    match cfg.command {
        Command::Simulate => simulate(cfg, field, out),
        Command::Bound => bound(cfg, &field, out),
        Command::MinSwitches => min_switches(cfg, &field, out),
        Command::Sweep => sweep(cfg, &field, out),
        Command::Verify => verify(cfg, &field, out),
    }
}

/// Parses `args`, runs, reports errors on stderr and returns the exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cfg, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
