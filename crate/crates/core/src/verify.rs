//! Randomized and deterministic invariant suites, runnable from the CLI.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::analysis::{
    detect_intervals, entanglement_at, linspace, period_report, theta0_boundaries, ys_class1,
    ys_class2, ys_dynamic, ys_theta0_piecewise, FreezeKind, DEFAULT_FREEZE_TOL, DEFAULT_SCAN_STEP,
};
use crate::dynamics::{
    evolve_analytic, numeric_trajectory, AmplitudeState, Frame, InitialCondition, NormalizedTriple,
    DEFAULT_STEP_G,
};
use crate::entanglement::{check_monogamy, one_to_other, schmidt_route_y, MONOGAMY_TOL};
use crate::error::{Error, Result};
use crate::model::{verify_excitation_conservation, ModelParams};

pub const SCHEMA_VERSION: u32 = 1;

/// Suite names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "conservation",
    "closed-form",
    "oracle",
    "inequalities",
    "monogamy",
    "measure-path",
    "periodicity",
    "freezing",
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Overrides each suite's default sample count.
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub checks: usize,
    pub failures: usize,
    /// Largest observed error relative to the suite's reference values.
    pub max_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub schema_version: u32,
    pub seed: u64,
    pub suites: Vec<SuiteOutcome>,
    pub passed: bool,
}

struct Tally {
    name: &'static str,
    checks: usize,
    failures: usize,
    max_error: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            checks: 0,
            failures: 0,
            max_error: 0.0,
        }
    }

    /// Records `error <= tol` (NaN fails).
    fn within(&mut self, error: f64, tol: f64) {
        self.checks += 1;
        if error.is_nan() || error > tol {
            self.failures += 1;
        }
        if error.is_nan() {
            self.max_error = f64::NAN;
        } else if !self.max_error.is_nan() {
            self.max_error = self.max_error.max(error);
        }
    }

    fn holds(&mut self, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome {
            name: self.name.to_string(),
            checks: self.checks,
            failures: self.failures,
            max_error: self.max_error,
            passed: self.failures == 0,
        }
    }
}

/// Haar-random point on the unit sphere of `C³`.
pub fn random_amplitudes<R: Rng + ?Sized>(rng: &mut R) -> [C64; 3] {
    loop {
        let amps: [C64; 3] = std::array::from_fn(|_| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return amps.map(|a| a / norm);
        }
    }
}

pub fn random_initial<R: Rng + ?Sized>(rng: &mut R) -> InitialCondition {
    let [a0, a1, a2] = random_amplitudes(rng);
    InitialCondition::General(
        NormalizedTriple::new(a0, a1, a2).expect("sphere sample is normalized"),
    )
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> AmplitudeState {
    AmplitudeState::new(random_amplitudes(rng), Frame::Slow, 0.0)
}

fn resonant() -> ModelParams {
    ModelParams::resonant(1.0, 0.0).expect("unit coupling is valid")
}

pub fn rng_for(opts: &VerifyOptions, suite: &str) -> ChaCha8Rng {
    // independent stream per suite so adding a suite does not shift others
    let salt = suite
        .bytes()
        .fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(u64::from(b)));
    ChaCha8Rng::seed_from_u64(opts.seed ^ salt)
}

fn conservation(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("conservation");
    let mut rng = rng_for(opts, "conservation");
    for _ in 0..opts.samples.unwrap_or(100) {
        let params = ModelParams::new(
            rng.gen_range(0.1..3.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
        )?;
        for m in 0..=10 {
            tally.holds(verify_excitation_conservation(m, &params));
        }
    }
    Ok(tally.finish())
}

fn closed_form(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("closed-form");
    let params = resonant();
    let taus = linspace(0.0, 4.0, opts.samples.unwrap_or(4001).max(2), true);
    for &tau in &taus {
        let dynamic = ys_dynamic(&InitialCondition::CavityExcited, &params, tau)?;
        tally.within((ys_class1(tau) - dynamic).abs(), 1e-10);
    }
    for k in 0..=20 {
        let theta = f64::from(k) * 0.05 * PI;
        for &tau in &taus {
            let dynamic = ys_dynamic(&InitialCondition::BellTheta(theta), &params, tau)?;
            tally.within((ys_class2(theta, tau) - dynamic).abs(), 1e-10);
        }
    }
    for &tau in taus.iter().filter(|&&t| t <= 2.0) {
        tally.within(
            (ys_class2(0.0, tau) - ys_theta0_piecewise(tau)).abs(),
            1e-10,
        );
    }
    Ok(tally.finish())
}

fn oracle(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("oracle");
    let mut rng = rng_for(opts, "oracle");
    let taus = linspace(0.0, 8.0, 81, true);
    for _ in 0..opts.samples.unwrap_or(20) {
        let init = random_initial(&mut rng);
        for detuning in [0.0, 0.5, 2.0] {
            let params = ModelParams::with_detuning(1.0, 0.0, detuning)?;
            let times: Vec<f64> = taus.iter().map(|&t| params.time_from_tau(t)).collect();
            let numeric = numeric_trajectory(&init, &params, &times, DEFAULT_STEP_G / params.g())?;
            for (num, &t) in numeric.iter().zip(&times) {
                let ana = evolve_analytic(&init, &params, t);
                let err = num
                    .amplitudes
                    .iter()
                    .zip(ana.amplitudes)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                tally.within(err, 1e-7);
            }
        }
    }
    Ok(tally.finish())
}

/// Ratio law check: `Y_i / Y_S = |a_i|²` per party.
pub fn ratio_law_error(state: &AmplitudeState) -> Result<f64> {
    let y = one_to_other(state)?;
    let pops = state.populations();
    let norm: f64 = pops.iter().sum();
    Ok(y.as_array()
        .iter()
        .zip(pops)
        .map(|(yi, p)| (yi / y.y_sum() - p / norm).abs())
        .fold(0.0, f64::max))
}

fn inequalities(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("inequalities");
    let mut rng = rng_for(opts, "inequalities");
    for _ in 0..opts.samples.unwrap_or(10_000) {
        let init = random_initial(&mut rng);
        let params = ModelParams::with_detuning(1.0, 0.0, rng.gen_range(-2.0..2.0))?;
        let state = evolve_analytic(&init, &params, rng.gen_range(0.0..20.0));
        tally.within((state.norm_sqr() - 1.0).abs(), 1e-10);
        let y = one_to_other(&state)?;
        let [y0, y1, y2] = y.as_array();
        tally.within(y.y_sum() - 2.0, 1e-12);
        for (a, b, c) in [(y0, y1, y2), (y1, y0, y2), (y2, y0, y1)] {
            tally.within(a - (b + c), 1e-12);
            tally.within(a - 1.0, 0.0);
        }
        if (y.y_sum() - 2.0).abs() <= DEFAULT_FREEZE_TOL {
            tally.within(ratio_law_error(&state)?, DEFAULT_FREEZE_TOL);
        }
    }
    Ok(tally.finish())
}

fn monogamy(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("monogamy");
    let mut rng = rng_for(opts, "monogamy");
    for _ in 0..opts.samples.unwrap_or(10_000) {
        let report = check_monogamy(&random_state(&mut rng))?;
        for check in report.checks {
            tally.within(-check.slack, MONOGAMY_TOL);
        }
    }
    Ok(tally.finish())
}

fn measure_path(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("measure-path");
    let mut rng = rng_for(opts, "measure-path");
    for _ in 0..opts.samples.unwrap_or(1000) {
        let state = random_state(&mut rng);
        let fast = one_to_other(&state)?.as_array();
        for (party, y) in fast.iter().enumerate() {
            let slow = schmidt_route_y(&state, party)?;
            tally.within((slow - y).abs(), 1e-12);
        }
    }
    Ok(tally.finish())
}

fn periodicity(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("periodicity");
    let mut rng = rng_for(opts, "periodicity");
    let params = resonant();
    let mut inits = vec![InitialCondition::CavityExcited];
    inits.extend((0..=20).map(|k| InitialCondition::BellTheta(f64::from(k) * 0.05 * PI)));
    inits.extend((0..opts.samples.unwrap_or(5)).map(|_| random_initial(&mut rng)));
    for init in &inits {
        let report = period_report(init, &params, 2.0)?;
        tally.within(report.ys_max_deviation, 1e-10);
        tally.within(report.swap_max_deviation, 1e-10);
        tally.within(report.individual_swap_max_deviation, 1e-10);
    }
    Ok(tally.finish())
}

fn freezing(_opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("freezing");
    let params = resonant();

    let class1 = detect_intervals(
        |t| ys_dynamic(&InitialCondition::CavityExcited, &params, t).unwrap_or(f64::NAN),
        0.0,
        2.0,
        DEFAULT_FREEZE_TOL,
        DEFAULT_SCAN_STEP,
    )?;
    let frozen: Vec<_> = class1
        .iter()
        .filter(|i| i.kind == FreezeKind::Frozen)
        .collect();
    tally.holds(frozen.len() == 1);
    if let Some(iv) = frozen.first() {
        tally.within((iv.t_start - 0.5).abs(), 1e-9);
        tally.within((iv.t_end - 1.5).abs(), 1e-9);
    }

    let (tau1, tau2) = theta0_boundaries();
    let theta0 = detect_intervals(
        |t| ys_dynamic(&InitialCondition::BellTheta(0.0), &params, t).unwrap_or(f64::NAN),
        0.0,
        2.0,
        DEFAULT_FREEZE_TOL,
        DEFAULT_SCAN_STEP,
    )?;
    let frozen: Vec<_> = theta0
        .iter()
        .filter(|i| i.kind == FreezeKind::Frozen)
        .collect();
    tally.holds(frozen.len() == 1);
    if let Some(iv) = frozen.first() {
        tally.within((iv.t_start - tau1).abs(), 1e-9);
        tally.within((iv.t_end - tau2).abs(), 1e-9);
    }

    let cold = InitialCondition::BellTheta(0.75 * PI);
    let symmetric = InitialCondition::BellTheta(0.25 * PI);
    for tau in linspace(0.0, 4.0, 4001, true) {
        tally.within((ys_dynamic(&cold, &params, tau)? - 2.0).abs(), 1e-12);
        if tau >= 1.0 {
            tally.within(
                (ys_dynamic(&symmetric, &params, tau)? - ys_class1(tau - 1.0)).abs(),
                1e-10,
            );
        }
    }

    // class 1 thawing: the cavity holds half of Y_S, each atom a quarter
    for tau in linspace(0.0, 2.0, 401, true) {
        let (state, y) = entanglement_at(&InitialCondition::CavityExcited, &params, tau)?;
        if (y.y_sum() - 2.0).abs() > DEFAULT_FREEZE_TOL {
            tally.within((y.y0 - y.y_sum() / 2.0).abs(), 1e-12);
            tally.within((y.y1 - y.y_sum() / 4.0).abs(), 1e-12);
            tally.within((y.y2 - y.y_sum() / 4.0).abs(), 1e-12);
        } else {
            tally.within(ratio_law_error(&state)?, 1e-10);
        }
    }
    Ok(tally.finish())
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteOutcome> {
    match name {
        "conservation" => conservation(opts),
        "closed-form" => closed_form(opts),
        "oracle" => oracle(opts),
        "inequalities" => inequalities(opts),
        "monogamy" => monogamy(opts),
        "measure-path" => measure_path(opts),
        "periodicity" => periodicity(opts),
        "freezing" => freezing(opts),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

/// Runs the named suites, or all of them when `names` is empty.
pub fn run_suites(names: &[String], opts: &VerifyOptions) -> Result<VerifySummary> {
    let names: Vec<&str> = if names.is_empty() {
        SUITES.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    // reject unknown names before spending time on the known ones
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
        return Err(Error::UnknownSuite(bad.to_string()));
    }
    let suites = names
        .iter()
        .map(|n| run_suite(n, opts))
        .collect::<Result<Vec<_>>>()?;
    let passed = suites.iter().all(|s| s.passed);
    Ok(VerifySummary {
        schema_version: SCHEMA_VERSION,
        seed: opts.seed,
        suites,
        passed,
    })
}
