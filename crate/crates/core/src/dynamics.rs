//! Single-excitation dynamics of the two atoms and the cavity mode.
//!
//! The state is `a0 |1,g,g> + a1 |0,e,g> + a2 |0,g,e>`. Two independent
//! routes compute it: the closed-form solution for the slowly varying
//! amplitudes, and a fixed-step fourth-order Runge–Kutta integration of
//! their equations of motion.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Tolerance on `|a0|² + |a1|² + |a2|² − 1` for user-supplied amplitudes.
pub const INITIAL_NORM_TOL: f64 = 1e-10;

/// Default Runge–Kutta step, in units of `1/g`.
pub const DEFAULT_STEP_G: f64 = 1e-4;

const I: C64 = C64::new(0.0, 1.0);

/// Whether amplitudes carry their free-evolution phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Frame {
    /// `a_i(t)`, the Schrödinger-picture amplitudes.
    Full,
    /// `ã_i(t)`, with `e^{-iω₀t}` (atoms) and `e^{-iωt}` (cavity) removed.
    Slow,
}

/// Amplitudes `(a0, a1, a2)` of cavity, atom 1 and atom 2 at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeState {
    pub amplitudes: [C64; 3],
    pub frame: Frame,
    /// Time in units of `1/g` scaled by `g` (i.e. the physical time).
    pub t: f64,
}

impl AmplitudeState {
    pub fn new(amplitudes: [C64; 3], frame: Frame, t: f64) -> Self {
        AmplitudeState {
            amplitudes,
            frame,
            t,
        }
    }

    pub fn a0(&self) -> C64 {
        self.amplitudes[0]
    }

    pub fn a1(&self) -> C64 {
        self.amplitudes[1]
    }

    pub fn a2(&self) -> C64 {
        self.amplitudes[2]
    }

    /// `|a_i|²` per party.
    pub fn populations(&self) -> [f64; 3] {
        self.amplitudes.map(|a| a.norm_sqr())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.populations().iter().sum()
    }
}

/// Amplitude triple validated to unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedTriple([C64; 3]);

impl NormalizedTriple {
    pub fn new(a0: C64, a1: C64, a2: C64) -> Result<Self> {
        let amps = [a0, a1, a2];
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::param("amplitudes", "all amplitudes must be finite"));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > INITIAL_NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(NormalizedTriple(amps))
    }

    pub fn amplitudes(&self) -> [C64; 3] {
        self.0
    }
}

/// Initial state at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// `|1,g,g>`: the excitation sits in the cavity.
    CavityExcited,
    /// `cos θ |0,e,g> + sin θ |0,g,e>`, θ in radians.
    BellTheta(f64),
    General(NormalizedTriple),
}

impl InitialCondition {
    pub fn general(a0: C64, a1: C64, a2: C64) -> Result<Self> {
        NormalizedTriple::new(a0, a1, a2).map(InitialCondition::General)
    }

    /// Amplitudes `(a0, a1, a2)` at `t = 0`, identical in both frames.
    pub fn amplitudes(&self) -> [C64; 3] {
        match *self {
            InitialCondition::CavityExcited => {
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]
            }
            InitialCondition::BellTheta(theta) => {
                let (s, c) = theta.sin_cos();
                [C64::new(0.0, 0.0), C64::new(c, 0.0), C64::new(s, 0.0)]
            }
            InitialCondition::General(triple) => triple.amplitudes(),
        }
    }
}

/// Constants `(α, β, γ)` of the closed-form solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionCoefficients {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
}

pub fn coefficients(init: &InitialCondition, params: &ModelParams) -> SolutionCoefficients {
    let [c0, c1, c2] = init.amplitudes();
    let (g, delta, big_omega) = (params.g(), params.delta(), params.big_omega());
    // Ω² − Δ² is G² = 8g² analytically; use that form to avoid cancellation.
    let gap = params.big_g() * params.big_g();
    let atoms = c1 + c2;
    let alpha = atoms * (4.0 * g * g / gap);
    let beta = (atoms * (4.0 * g * g * delta) + c0 * (2.0 * g * gap)) / (big_omega * gap);
    let gamma = (atoms * (2.0 * g) - c0 * delta) / big_omega;
    SolutionCoefficients { alpha, beta, gamma }
}

/// Closed-form slowly varying amplitudes at time `t`.
pub fn evolve_analytic(init: &InitialCondition, params: &ModelParams, t: f64) -> AmplitudeState {
    let [c0, c1, c2] = init.amplitudes();
    let SolutionCoefficients { alpha, beta, gamma } = coefficients(init, params);
    let half_omega_t = 0.5 * params.big_omega() * t;
    let (s, c) = half_omega_t.sin_cos();
    let rot = C64::from_polar(1.0, 0.5 * params.delta() * t);
    // written so that every term vanishes exactly at t = 0
    let atom_osc = (alpha * c - I * beta * s) * rot - alpha;
    let a1 = c1 + atom_osc;
    let a2 = c2 + atom_osc;
    let a0 = (c0 * c - I * gamma * s) * rot.conj();
    AmplitudeState::new([a0, a1, a2], Frame::Slow, t)
}

/// Restores the free-evolution phases: `a_i = ã_i e^{-iω₀t}` for the atoms
/// and `a0 = ã0 e^{-iωt}` for the cavity.
pub fn slow_to_full(state: &AmplitudeState, params: &ModelParams) -> Result<AmplitudeState> {
    if state.frame != Frame::Slow {
        return Err(Error::WrongFrame {
            expected: Frame::Slow,
            found: state.frame,
        });
    }
    let cav = C64::from_polar(1.0, -params.omega() * state.t);
    let atom = C64::from_polar(1.0, -params.omega0() * state.t);
    let [a0, a1, a2] = state.amplitudes;
    Ok(AmplitudeState::new(
        [a0 * cav, a1 * atom, a2 * atom],
        Frame::Full,
        state.t,
    ))
}

pub fn full_to_slow(state: &AmplitudeState, params: &ModelParams) -> Result<AmplitudeState> {
    if state.frame != Frame::Full {
        return Err(Error::WrongFrame {
            expected: Frame::Full,
            found: state.frame,
        });
    }
    let cav = C64::from_polar(1.0, params.omega() * state.t);
    let atom = C64::from_polar(1.0, params.omega0() * state.t);
    let [a0, a1, a2] = state.amplitudes;
    Ok(AmplitudeState::new(
        [a0 * cav, a1 * atom, a2 * atom],
        Frame::Slow,
        state.t,
    ))
}

fn slow_rhs(params: &ModelParams, t: f64, y: &[C64; 3]) -> [C64; 3] {
    let g = params.g();
    let rot = C64::from_polar(1.0, params.delta() * t);
    let atom = -I * g * y[0] * rot;
    let cav = -I * g * (y[1] + y[2]) * rot.conj();
    [cav, atom, atom]
}

fn rk4_step(params: &ModelParams, t: f64, h: f64, y: &[C64; 3]) -> [C64; 3] {
    let axpy =
        |a: &[C64; 3], k: &[C64; 3], s: f64| [a[0] + k[0] * s, a[1] + k[1] * s, a[2] + k[2] * s];
    let k1 = slow_rhs(params, t, y);
    let k2 = slow_rhs(params, t + 0.5 * h, &axpy(y, &k1, 0.5 * h));
    let k3 = slow_rhs(params, t + 0.5 * h, &axpy(y, &k2, 0.5 * h));
    let k4 = slow_rhs(params, t + h, &axpy(y, &k3, h));
    let w = h / 6.0;
    std::array::from_fn(|i| y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * w)
}

fn check_step(dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param(
            "dt",
            format!("step must be finite and > 0, got {dt}"),
        ));
    }
    Ok(())
}

/// Integrates the slow-frame equations of motion from 0 to `t` with
/// classical RK4 and step `dt`; the last step is shortened to land on `t`.
pub fn evolve_numeric(
    init: &InitialCondition,
    params: &ModelParams,
    t: f64,
    dt: f64,
) -> Result<AmplitudeState> {
    Ok(numeric_trajectory(init, params, &[t], dt)?.remove(0))
}

/// RK4 solution sampled at each of `times` (non-negative, ascending) in a
/// single forward pass.
pub fn numeric_trajectory(
    init: &InitialCondition,
    params: &ModelParams,
    times: &[f64],
    dt: f64,
) -> Result<Vec<AmplitudeState>> {
    check_step(dt)?;
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::param("t", "sample times must be finite and >= 0"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("t", "sample times must be ascending"));
    }
    let mut y = init.amplitudes();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        // integer step count keeps the grid free of accumulated drift
        let remaining = target - t;
        let n = (remaining / dt).floor() as u64;
        let start = t;
        for k in 0..n {
            let tk = start + k as f64 * dt;
            y = rk4_step(params, tk, dt, &y);
        }
        let t_grid = start + n as f64 * dt;
        let tail = target - t_grid;
        if tail > 0.0 {
            y = rk4_step(params, t_grid, tail, &y);
        }
        t = target;
        out.push(AmplitudeState::new(y, Frame::Slow, target));
    }
    Ok(out)
}

/// Largest component deviation between `a` and `b` after rotating `a` by the
/// global phase that best aligns it with `b`.
pub fn phase_aligned_distance(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    let overlap: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}
