//! Total one-to-other entanglement `Y_S = Y₀ + Y₁ + Y₂` along the
//! dimensionless time axis `τ = Gt/π`: closed forms at resonance, the
//! dynamic route through the amplitudes, freezing/thawing interval
//! detection, `θ × τ` sweeps and period checks.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{
    evolve_analytic, phase_aligned_distance, slow_to_full, AmplitudeState, InitialCondition,
};
use crate::entanglement::{one_to_other, EntanglementTriple};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Maximum of `Y_S` on the single-excitation manifold.
pub const YS_MAX: f64 = 2.0;

/// Freezing tolerance for closed-form and analytic curves.
pub const DEFAULT_FREEZE_TOL: f64 = 1e-9;

/// Freezing tolerance for curves sampled from the numerical propagator.
pub const NUMERIC_FREEZE_TOL: f64 = 1e-6;

/// Period of `Y_S` in `τ` at resonance.
pub const YS_PERIOD: f64 = 2.0;

/// Default scan step: 2048 samples per period.
pub const DEFAULT_SCAN_STEP: f64 = YS_PERIOD / 2048.0;

/// Width at which boundary bisection stops.
pub const BOUNDARY_PRECISION: f64 = 1e-12;

/// `Y_S(τ)` for the initial state `|1,g,g>`.
pub fn ys_class1(tau: f64) -> f64 {
    let phase = tau.rem_euclid(2.0);
    if (0.5..=1.5).contains(&phase) {
        YS_MAX
    } else {
        2.0 - 2.0 * (PI * tau).cos()
    }
}

/// `Y_S(τ)` for `cos θ |0,e,g> + sin θ |0,g,e>` as three `2·min{…}` terms.
pub fn ys_class2(theta: f64, tau: f64) -> f64 {
    let (s2, c2) = (2.0 * theta).sin_cos();
    let (sn, cs) = (0.5 * PI * tau).sin_cos();
    let (cs2, sn2) = (cs * cs, sn * sn);
    let sym = 1.0 + s2;
    let anti = 1.0 - s2;

    let cavity = (sym / 2.0 * cs2 + anti / 2.0).min(sym / 2.0 * sn2);
    let atom2 = (sym / 4.0 * cs2 + sym / 2.0 * sn2 + c2 / 2.0 * cs + anti / 4.0)
        .min(sym / 4.0 * cs2 - c2 / 2.0 * cs + anti / 4.0);
    let atom1 = (sym / 4.0 * cs2 + sym / 2.0 * sn2 - c2 / 2.0 * cs + anti / 4.0)
        .min(sym / 4.0 * cs2 + c2 / 2.0 * cs + anti / 4.0);
    2.0 * (cavity + atom2 + atom1)
}

/// Freezing window `(τ₁, τ₂)` within the first period for `θ = 0`:
/// `τ₁ = 2 arccos(√2 − 1)/π`, `τ₂ = 2 arccos(1 − √2)/π`.
pub fn theta0_boundaries() -> (f64, f64) {
    let root = SQRT_2 - 1.0;
    (2.0 * root.acos() / PI, 2.0 * (-root).acos() / PI)
}

/// Three-branch piecewise `Y_S(τ)` for `θ = 0`.
///
/// `τ` is first reduced into `[0, 2)`: the branches are written in terms of
/// `cos(Gt/2)`, whose sign alternates between consecutive periods while
/// `Y_S` itself does not.
pub fn ys_theta0_piecewise(tau: f64) -> f64 {
    let (tau1, tau2) = theta0_boundaries();
    let r = tau.rem_euclid(YS_PERIOD);
    let c_full = (PI * r).cos();
    let c_half = (0.5 * PI * r).cos();
    if r <= tau1 {
        -0.5 * c_full - 2.0 * c_half + 2.5
    } else if r <= tau2 {
        YS_MAX
    } else {
        -0.5 * c_full + 2.0 * c_half + 2.5
    }
}

/// Slow-frame amplitudes and their one-to-other entanglements at `τ`.
pub fn entanglement_at(
    init: &InitialCondition,
    params: &ModelParams,
    tau: f64,
) -> Result<(AmplitudeState, EntanglementTriple)> {
    let state = evolve_analytic(init, params, params.time_from_tau(tau));
    let triple = one_to_other(&state)?;
    Ok((state, triple))
}

/// `Y_S(τ)` through the closed-form amplitudes, for any detuning.
pub fn ys_dynamic(init: &InitialCondition, params: &ModelParams, tau: f64) -> Result<f64> {
    entanglement_at(init, params, tau).map(|(_, y)| y.y_sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FreezeKind {
    Frozen,
    Thawing,
}

/// Window `[t_start, t_end]` of dimensionless time `Gt/π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreezeInterval {
    pub t_start: f64,
    pub t_end: f64,
    pub kind: FreezeKind,
}

impl FreezeInterval {
    pub fn length(&self) -> f64 {
        self.t_end - self.t_start
    }
}

fn classify(value: f64, tol: f64) -> FreezeKind {
    if (value - YS_MAX).abs() <= tol {
        FreezeKind::Frozen
    } else {
        FreezeKind::Thawing
    }
}

/// Splits `[start, end]` into alternating frozen and thawing intervals.
///
/// The curve is sampled every `scan_step` (the last step shortened to hit
/// `end`), samples are classified by `|Y_S − 2| ≤ freeze_tol`, and every
/// change of class is bisected on the same predicate down to
/// [`BOUNDARY_PRECISION`]. Features narrower than `scan_step` can be missed.
pub fn detect_intervals<F>(
    curve: F,
    start: f64,
    end: f64,
    freeze_tol: f64,
    scan_step: f64,
) -> Result<Vec<FreezeInterval>>
where
    F: Fn(f64) -> f64,
{
    if !(start.is_finite() && end.is_finite()) || end <= start {
        return Err(Error::EmptyRange { start, end });
    }
    if !(scan_step.is_finite() && scan_step > 0.0) {
        return Err(Error::param(
            "scan_step",
            format!("must be finite and > 0, got {scan_step}"),
        ));
    }
    if !(freeze_tol.is_finite() && freeze_tol > 0.0) {
        return Err(Error::param(
            "freeze_tol",
            format!("must be finite and > 0, got {freeze_tol}"),
        ));
    }
    let kind_at = |tau: f64| classify(curve(tau), freeze_tol);
    let n = ((end - start) / scan_step).ceil().max(1.0) as usize;
    let sample = |k: usize| {
        if k == n {
            end
        } else {
            start + (end - start) * k as f64 / n as f64
        }
    };

    let mut intervals = Vec::new();
    let mut run_start = start;
    let mut prev_tau = start;
    let mut prev_kind = kind_at(start);
    for k in 1..=n {
        let tau = sample(k);
        let kind = kind_at(tau);
        if kind != prev_kind {
            let (mut lo, mut hi) = (prev_tau, tau);
            while hi - lo > BOUNDARY_PRECISION {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if kind_at(mid) == prev_kind {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let boundary = 0.5 * (lo + hi);
            if boundary > run_start {
                intervals.push(FreezeInterval {
                    t_start: run_start,
                    t_end: boundary,
                    kind: prev_kind,
                });
            }
            run_start = boundary;
            prev_kind = kind;
        }
        prev_tau = tau;
    }
    if end > run_start {
        intervals.push(FreezeInterval {
            t_start: run_start,
            t_end: end,
            kind: prev_kind,
        });
    }
    Ok(intervals)
}

/// Dense `θ × τ` grid of `Y_S`, rows indexed by `θ/π`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    /// `θ/π` per row.
    pub theta_axis: Vec<f64>,
    /// `Gt/π` per column.
    pub time_axis: Vec<f64>,
    /// Row-major, `theta_axis.len() × time_axis.len()`.
    pub values: Vec<f64>,
}

impl SweepGrid {
    pub fn rows(&self) -> usize {
        self.theta_axis.len()
    }

    pub fn cols(&self) -> usize {
        self.time_axis.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols()..(i + 1) * self.cols()]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols() + j]
    }

    /// Share of each row's samples with `|Y_S − 2| ≤ tol`.
    pub fn frozen_fractions(&self, tol: f64) -> Vec<f64> {
        (0..self.rows())
            .map(|i| {
                let frozen = self
                    .row(i)
                    .iter()
                    .filter(|&&v| classify(v, tol) == FreezeKind::Frozen)
                    .count();
                frozen as f64 / self.cols() as f64
            })
            .collect()
    }

    /// `θ/π` of every row whose frozen fraction is within [`FRACTION_TIE_TOL`]
    /// of the smallest. Rows mirrored about `θ/π = 1/4` give the same curve
    /// with the atoms swapped, so minimizers usually come in pairs.
    ///
    /// Sample counts quantize the fraction to `1/cols`; see [`frozen_profile`]
    /// for the interval-based measure.
    pub fn least_frozen_thetas(&self, tol: f64) -> Vec<f64> {
        least_frozen(&self.theta_axis, &self.frozen_fractions(tol))
    }
}

/// Entries of `theta_points` whose fraction is within [`FRACTION_TIE_TOL`] of
/// the smallest.
pub fn least_frozen(theta_points: &[f64], fractions: &[f64]) -> Vec<f64> {
    let Some(min) = fractions.iter().cloned().reduce(f64::min) else {
        return Vec::new();
    };
    fractions
        .iter()
        .zip(theta_points)
        .filter(|(f, _)| **f - min <= FRACTION_TIE_TOL)
        .map(|(_, &t)| t)
        .collect()
}

/// Scan step for [`frozen_profile`]; the frozen windows near the least frozen
/// angles are a few `10⁻⁴` wide.
pub const PROFILE_SCAN_STEP: f64 = YS_PERIOD / 16384.0;

/// Frozen fractions closer than this count as tied.
pub const FRACTION_TIE_TOL: f64 = 1e-12;

/// `n` evenly spaced points from `start` to `end`; the endpoint is included
/// when `endpoint` is set. `n = 1` yields `[start]`.
pub fn linspace(start: f64, end: f64, n: usize, endpoint: bool) -> Vec<f64> {
    let div = match (n, endpoint) {
        (0, _) => return Vec::new(),
        (1, _) => return vec![start],
        (_, true) => (n - 1) as f64,
        (_, false) => n as f64,
    };
    (0..n)
        .map(|k| start + (end - start) * k as f64 / div)
        .collect()
}

/// Fills a grid of `Y_S` over `θ/π × Gt/π` for Bell-θ initial states.
///
/// Resonant parameters use the closed form; detuned ones go through the
/// amplitudes. Cells are evaluated in parallel on the current rayon pool.
pub fn sweep(theta_points: &[f64], tau_points: &[f64], params: &ModelParams) -> Result<SweepGrid> {
    if theta_points.is_empty() {
        return Err(Error::param(
            "theta_points",
            "at least one θ value is required",
        ));
    }
    if tau_points.is_empty() {
        return Err(Error::param(
            "tau_points",
            "at least one time value is required",
        ));
    }
    let cols = tau_points.len();
    let values = (0..theta_points.len() * cols)
        .into_par_iter()
        .map(|idx| bell_ys(theta_points[idx / cols], tau_points[idx % cols], params))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SweepGrid {
        theta_axis: theta_points.to_vec(),
        time_axis: tau_points.to_vec(),
        values,
    })
}

fn bell_ys(theta_over_pi: f64, tau: f64, params: &ModelParams) -> Result<f64> {
    let theta = theta_over_pi * PI;
    if params.is_resonant() {
        Ok(ys_class2(theta, tau))
    } else {
        ys_dynamic(&InitialCondition::BellTheta(theta), params, tau)
    }
}

/// Share of `[start, end]` spent frozen, per `θ/π`, from the detected
/// interval lengths. Windows shorter than `scan_step` can be missed.
pub fn frozen_profile(
    theta_points: &[f64],
    start: f64,
    end: f64,
    params: &ModelParams,
    freeze_tol: f64,
    scan_step: f64,
) -> Result<Vec<f64>> {
    theta_points
        .par_iter()
        .map(|&theta| {
            // evaluation errors surface as NaN, which classifies as thawing
            let curve = |tau| bell_ys(theta, tau, params).unwrap_or(f64::NAN);
            let intervals = detect_intervals(curve, start, end, freeze_tol, scan_step)?;
            let frozen: f64 = intervals
                .iter()
                .filter(|i| i.kind == FreezeKind::Frozen)
                .map(FreezeInterval::length)
                .sum();
            Ok(frozen / (end - start))
        })
        .collect()
}

/// Tolerance of the period checks.
pub const PERIOD_TOL: f64 = 1e-10;

/// Number of `τ` samples in the period checks, spread over `[0, 2P]`.
pub const PERIOD_SAMPLES: usize = 4001;

/// Periodicity of `Y_S` compared against the (longer) period of the state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodReport {
    pub period: f64,
    /// `max |Y_S(τ + P) − Y_S(τ)|`.
    pub ys_max_deviation: f64,
    pub ys_periodic: bool,
    /// `max` phase-aligned distance between `a(τ + P)` and `a(τ)` with the
    /// atoms exchanged.
    pub swap_max_deviation: f64,
    pub swap_antiperiodic: bool,
    /// `max(|Y₁(τ + P) − Y₂(τ)|, |Y₂(τ + P) − Y₁(τ)|)`.
    pub individual_swap_max_deviation: f64,
    /// `max` phase-aligned distance between `a(τ + P)` and `a(τ)` with no
    /// exchange.
    pub state_max_deviation: f64,
    pub state_periodic: bool,
}

pub fn period_report(
    init: &InitialCondition,
    params: &ModelParams,
    tau_period_guess: f64,
) -> Result<PeriodReport> {
    if !params.is_resonant() {
        return Err(Error::param(
            "params",
            "period checks require resonant parameters",
        ));
    }
    if !(tau_period_guess.is_finite() && tau_period_guess > 0.0) {
        return Err(Error::param(
            "tau_period_guess",
            format!("must be finite and > 0, got {tau_period_guess}"),
        ));
    }
    let period = tau_period_guess;
    let full_at = |tau: f64| -> Result<(AmplitudeState, EntanglementTriple)> {
        let (slow, y) = entanglement_at(init, params, tau)?;
        Ok((slow_to_full(&slow, params)?, y))
    };
    let mut report = PeriodReport {
        period,
        ys_max_deviation: 0.0,
        ys_periodic: false,
        swap_max_deviation: 0.0,
        swap_antiperiodic: false,
        individual_swap_max_deviation: 0.0,
        state_max_deviation: 0.0,
        state_periodic: false,
    };
    for tau in linspace(0.0, 2.0 * period, PERIOD_SAMPLES, true) {
        let (now, y_now) = full_at(tau)?;
        let (later, y_later) = full_at(tau + period)?;
        let [a0, a1, a2] = now.amplitudes;
        report.ys_max_deviation = report
            .ys_max_deviation
            .max((y_later.y_sum() - y_now.y_sum()).abs());
        report.swap_max_deviation = report
            .swap_max_deviation
            .max(phase_aligned_distance(&[a0, a2, a1], &later.amplitudes));
        report.state_max_deviation = report
            .state_max_deviation
            .max(phase_aligned_distance(&now.amplitudes, &later.amplitudes));
        let individual = (y_later.y1 - y_now.y2)
            .abs()
            .max((y_later.y2 - y_now.y1).abs());
        report.individual_swap_max_deviation = report.individual_swap_max_deviation.max(individual);
    }
    report.ys_periodic = report.ys_max_deviation <= PERIOD_TOL;
    report.swap_antiperiodic = report.swap_max_deviation <= PERIOD_TOL;
    report.state_periodic = report.state_max_deviation <= PERIOD_TOL;
    Ok(report)
}
