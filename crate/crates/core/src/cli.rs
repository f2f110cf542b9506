//! `cavityshare` command line: argument parsing, runners and file output.
//!
//! Time is given as `Gt/π` and angles as `θ/π` everywhere on the command
//! line. Frequencies are in units of the coupling `g`.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::analysis::{
    detect_intervals, frozen_profile, least_frozen, linspace, sweep, ys_dynamic, FreezeInterval,
    DEFAULT_FREEZE_TOL, DEFAULT_SCAN_STEP, PROFILE_SCAN_STEP,
};
use crate::dynamics::{
    evolve_analytic, numeric_trajectory, slow_to_full, InitialCondition, DEFAULT_STEP_G,
};
use crate::entanglement::one_to_other;
use crate::model::ModelParams;
use crate::verify::{run_suites, VerifyOptions, VerifySummary, SCHEMA_VERSION};

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "CAVITYSHARE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cavityshare",
    version,
    about = "Entanglement freezing and thawing of two atoms in a cavity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Amplitudes and one-to-other entanglements along Gt/π.
    Simulate(SimulateArgs),
    /// Y_S over a θ/π × Gt/π grid of Bell-θ initial states.
    Sweep(SweepArgs),
    /// Frozen and thawing intervals of Y_S.
    Detect(DetectArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Propagator {
    /// Closed-form amplitudes.
    Analytic,
    /// Fixed-step fourth-order Runge–Kutta.
    Rk4,
}

#[derive(Debug, Clone, Args)]
pub struct PhysicsArgs {
    /// Atom–cavity coupling g.
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Detuning Δ = ω₀ − ω in units of g.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub detuning: f64,
    /// Cavity frequency ω in units of g (sets the full-frame phases only).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub omega: f64,
}

impl PhysicsArgs {
    pub fn params(&self) -> Result<ModelParams, CliError> {
        let g = self.g;
        ModelParams::with_detuning(g, self.omega * g, self.detuning * g)
            .map_err(|e| CliError::usage(format!("{e}")))
    }
}

#[derive(Debug, Clone, Args)]
pub struct TimeArgs {
    /// First sample, in Gt/π.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau_min: f64,
    /// Last sample, in Gt/π.
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub tau_max: f64,
}

impl TimeArgs {
    fn check(&self) -> Result<(), CliError> {
        if !(self.tau_min.is_finite() && self.tau_max.is_finite()) || self.tau_min < 0.0 {
            return Err(CliError::usage(
                "--tau-min/--tau-max must be finite and --tau-min >= 0",
            ));
        }
        if self.tau_max <= self.tau_min {
            return Err(CliError::usage(format!(
                "--tau-max ({}) must exceed --tau-min ({})",
                self.tau_max, self.tau_min
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// class1 | bell:<θ/π> | general:<a0>,<a1>,<a2> (complex literals such as 0.6, 0.8i, 0.3-0.1i)
    #[arg(long)]
    pub init: InitSpec,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    /// Number of time samples (>= 2), endpoints included.
    #[arg(long, default_value_t = 4001)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Propagator::Analytic)]
    pub propagator: Propagator,
    /// Runge–Kutta step in units of 1/g.
    #[arg(long, default_value_t = DEFAULT_STEP_G)]
    pub dt: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// First θ/π row.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta_min: f64,
    /// End of the θ/π axis (excluded unless --theta-endpoint).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub theta_max: f64,
    /// Number of θ rows.
    #[arg(long, default_value_t = 512)]
    pub theta_samples: usize,
    /// Include --theta-max as the last row.
    #[arg(long)]
    pub theta_endpoint: bool,
    #[command(flatten)]
    pub time: TimeArgs,
    /// Number of time columns (>= 2), endpoints included.
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub init: InitSpec,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    /// |Y_S − 2| at or below this counts as frozen.
    #[arg(long, default_value_t = DEFAULT_FREEZE_TOL)]
    pub freeze_tol: f64,
    /// Scan step in Gt/π before boundary bisection.
    #[arg(long, default_value_t = DEFAULT_SCAN_STEP)]
    pub scan_step: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Suite to run (repeatable); all suites when omitted.
    #[arg(long = "suite")]
    pub suites: Vec<String>,
    /// Override each suite's sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Parsed `--init` value.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Class1,
    /// θ in units of π.
    Bell(f64),
    General([C64; 3]),
}

impl InitSpec {
    pub fn initial_condition(&self) -> Result<InitialCondition, CliError> {
        match *self {
            InitSpec::Class1 => Ok(InitialCondition::CavityExcited),
            InitSpec::Bell(theta_pi) => {
                Ok(InitialCondition::BellTheta(theta_pi * std::f64::consts::PI))
            }
            InitSpec::General([a0, a1, a2]) => InitialCondition::general(a0, a1, a2)
                .map_err(|e| CliError::usage(format!("invalid --init general amplitudes: {e}"))),
        }
    }
}

impl FromStr for InitSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "class1" {
            return Ok(InitSpec::Class1);
        }
        if let Some(theta) = s.strip_prefix("bell:") {
            let theta: f64 = theta
                .trim()
                .parse()
                .map_err(|_| format!("bell angle θ/π `{theta}` is not a number"))?;
            if !theta.is_finite() {
                return Err(format!("bell angle θ/π `{theta}` must be finite"));
            }
            return Ok(InitSpec::Bell(theta));
        }
        if let Some(rest) = s.strip_prefix("general:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 3 {
                return Err(format!(
                    "general expects three amplitudes a0,a1,a2, got {}",
                    parts.len()
                ));
            }
            let mut amps = [C64::new(0.0, 0.0); 3];
            for (i, (slot, text)) in amps.iter_mut().zip(&parts).enumerate() {
                *slot = C64::from_str(text.trim())
                    .map_err(|_| format!("amplitude a{i} `{text}` is not a complex number"))?;
            }
            return Ok(InitSpec::General(amps));
        }
        Err(format!(
            "unknown initial state `{s}` (expected class1, bell:<θ/π> or general:<a0>,<a1>,<a2>)"
        ))
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

/// Fixed 17-significant-digit scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn check_samples(flag: &str, n: usize) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::usage(format!(
            "{flag} must be at least 2, got {n}"
        )));
    }
    Ok(())
}

fn emit(output: Option<&PathBuf>, body: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, body)
            .map_err(|e| CliError::usage(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::usage(format!("stdout: {e}")))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ParamsJson {
    g: f64,
    omega: f64,
    omega0: f64,
    detuning: f64,
}

impl From<&ModelParams> for ParamsJson {
    fn from(p: &ModelParams) -> Self {
        ParamsJson {
            g: p.g(),
            omega: p.omega(),
            omega0: p.omega0(),
            detuning: p.delta(),
        }
    }
}

#[derive(Serialize)]
struct SampleJson {
    tau: f64,
    a0: [f64; 2],
    a1: [f64; 2],
    a2: [f64; 2],
    y0: f64,
    y1: f64,
    y2: f64,
    ys: f64,
}

#[derive(Serialize)]
struct SimulateJson {
    schema_version: u32,
    params: ParamsJson,
    samples: Vec<SampleJson>,
}

pub const SIMULATE_HEADER: &str = "tau,a0_re,a0_im,a1_re,a1_im,a2_re,a2_im,Y0,Y1,Y2,YS";

/// Time series of full-frame amplitudes and entanglements.
pub fn render_simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let params = args.physics.params()?;
    let init = args.init.initial_condition()?;
    args.time.check()?;
    check_samples("--samples", args.samples)?;
    let taus = linspace(args.time.tau_min, args.time.tau_max, args.samples, true);
    let err = |e: crate::Error| CliError::usage(e.to_string());

    let slow = match args.propagator {
        Propagator::Analytic => taus
            .iter()
            .map(|&tau| evolve_analytic(&init, &params, params.time_from_tau(tau)))
            .collect(),
        Propagator::Rk4 => {
            let times: Vec<f64> = taus.iter().map(|&tau| params.time_from_tau(tau)).collect();
            numeric_trajectory(&init, &params, &times, args.dt / params.g()).map_err(err)?
        }
    };

    let mut samples = Vec::with_capacity(taus.len());
    for (&tau, state) in taus.iter().zip(&slow) {
        let full = slow_to_full(state, &params).map_err(err)?;
        let y = one_to_other(&full).map_err(err)?;
        let c = |a: C64| [a.re, a.im];
        samples.push(SampleJson {
            tau,
            a0: c(full.a0()),
            a1: c(full.a1()),
            a2: c(full.a2()),
            y0: y.y0,
            y1: y.y1,
            y2: y.y2,
            ys: y.y_sum(),
        });
    }

    Ok(match args.format {
        Format::Json => to_json(&SimulateJson {
            schema_version: SCHEMA_VERSION,
            params: (&params).into(),
            samples,
        }),
        Format::Csv => {
            let mut out = String::with_capacity(samples.len() * 280);
            out.push_str(SIMULATE_HEADER);
            out.push('\n');
            for s in &samples {
                let cols = [
                    s.tau, s.a0[0], s.a0[1], s.a1[0], s.a1[1], s.a2[0], s.a2[1], s.y0, s.y1, s.y2,
                    s.ys,
                ];
                let line: Vec<String> = cols.iter().map(|&x| fmt_num(x)).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            out
        }
    })
}

#[derive(Serialize)]
struct SweepJson<'a> {
    schema_version: u32,
    params: ParamsJson,
    rows: usize,
    cols: usize,
    theta_axis: &'a [f64],
    time_axis: &'a [f64],
    values: &'a [f64],
    /// Share of the time range spent frozen, per row, from interval lengths.
    frozen_fraction: Vec<f64>,
    least_frozen_theta_over_pi: Vec<f64>,
}

pub fn render_sweep(args: &SweepArgs) -> Result<String, CliError> {
    let params = args.physics.params()?;
    args.time.check()?;
    check_samples("--samples", args.samples)?;
    if args.theta_samples == 0 {
        return Err(CliError::usage("--theta-samples must be at least 1"));
    }
    if !(args.theta_min.is_finite() && args.theta_max.is_finite()) {
        return Err(CliError::usage("--theta-min/--theta-max must be finite"));
    }
    let thetas = linspace(
        args.theta_min,
        args.theta_max,
        args.theta_samples,
        args.theta_endpoint,
    );
    let taus = linspace(args.time.tau_min, args.time.tau_max, args.samples, true);
    let grid = sweep(&thetas, &taus, &params).map_err(|e| CliError::usage(e.to_string()))?;

    Ok(match args.format {
        Format::Json => {
            let profile = frozen_profile(
                &thetas,
                args.time.tau_min,
                args.time.tau_max,
                &params,
                DEFAULT_FREEZE_TOL,
                PROFILE_SCAN_STEP,
            )
            .map_err(|e| CliError::usage(e.to_string()))?;
            to_json(&SweepJson {
                least_frozen_theta_over_pi: least_frozen(&thetas, &profile),
                frozen_fraction: profile,
                schema_version: SCHEMA_VERSION,
                params: (&params).into(),
                rows: grid.rows(),
                cols: grid.cols(),
                theta_axis: &grid.theta_axis,
                time_axis: &grid.time_axis,
                values: &grid.values,
            })
        }
        Format::Csv => {
            let mut out = String::with_capacity((grid.rows() + 1) * (grid.cols() + 1) * 24);
            out.push_str("theta_over_pi");
            for &tau in &grid.time_axis {
                write!(out, ",{}", fmt_num(tau)).unwrap();
            }
            out.push('\n');
            for (i, &theta) in grid.theta_axis.iter().enumerate() {
                out.push_str(&fmt_num(theta));
                for &v in grid.row(i) {
                    write!(out, ",{}", fmt_num(v)).unwrap();
                }
                out.push('\n');
            }
            out
        }
    })
}

#[derive(Serialize)]
struct DetectJson {
    schema_version: u32,
    freeze_tol: f64,
    scan_step: f64,
    intervals: Vec<FreezeInterval>,
}

pub fn detect(args: &DetectArgs) -> Result<Vec<FreezeInterval>, CliError> {
    let params = args.physics.params()?;
    let init = args.init.initial_condition()?;
    args.time.check()?;
    let curve = |tau: f64| ys_dynamic(&init, &params, tau).unwrap_or(f64::NAN);
    detect_intervals(
        curve,
        args.time.tau_min,
        args.time.tau_max,
        args.freeze_tol,
        args.scan_step,
    )
    .map_err(|e| CliError::usage(e.to_string()))
}

pub fn render_detect(args: &DetectArgs) -> Result<String, CliError> {
    let intervals = detect(args)?;
    Ok(match args.format {
        Format::Json => to_json(&DetectJson {
            schema_version: SCHEMA_VERSION,
            freeze_tol: args.freeze_tol,
            scan_step: args.scan_step,
            intervals,
        }),
        Format::Csv => {
            let mut out = String::from("t_start,t_end,kind\n");
            for iv in &intervals {
                writeln!(
                    out,
                    "{},{},{:?}",
                    fmt_num(iv.t_start),
                    fmt_num(iv.t_end),
                    iv.kind
                )
                .unwrap();
            }
            out
        }
    })
}

pub fn verify(args: &VerifyArgs) -> Result<VerifySummary, CliError> {
    let opts = VerifyOptions {
        seed: args.seed,
        samples: args.samples,
    };
    run_suites(&args.suites, &opts).map_err(|e| CliError::usage(e.to_string()))
}

/// Reads the sweep thread cap from [`THREADS_ENV`].
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

/// Executes a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Simulate(args) => {
            emit(args.output.as_ref(), &render_simulate(args)?).map(|_| EXIT_OK)
        }
        Command::Sweep(args) => {
            let body = match thread_cap()? {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| CliError::usage(format!("thread pool: {e}")))?
                    .install(|| render_sweep(args))?,
                None => render_sweep(args)?,
            };
            emit(args.output.as_ref(), &body).map(|_| EXIT_OK)
        }
        Command::Detect(args) => emit(args.output.as_ref(), &render_detect(args)?).map(|_| EXIT_OK),
        Command::Verify(args) => {
            let summary = verify(args)?;
            emit(args.output.as_ref(), &to_json(&summary))?;
            Ok(if summary.passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}
