//! Physical parameters of the two-atom, single-mode cavity and the
//! excitation-number block structure of its Hamiltonian.
//!
//! Kets are written `|n, s1, s2>` with slots (cavity photon number, atom 1,
//! atom 2). Frequencies are angular frequencies with ħ = 1.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Coupling constant and bare frequencies, plus the derived detuning and Rabi
/// frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    g: f64,
    omega: f64,
    omega0: f64,
    delta: f64,
    big_g: f64,
    big_omega: f64,
}

impl ModelParams {
    /// Builds parameters from the atom–cavity coupling `g`, the cavity
    /// frequency `omega` and the atomic transition frequency `omega0`.
    ///
    /// `g` must be finite and strictly positive; the closed-form solution
    /// divides by `G² = 8g²`.
    pub fn new(g: f64, omega: f64, omega0: f64) -> Result<Self> {
        if !g.is_finite() || g <= 0.0 {
            return Err(Error::param(
                "g",
                format!("coupling must be finite and > 0, got {g}"),
            ));
        }
        if !omega.is_finite() {
            return Err(Error::param(
                "omega",
                format!("must be finite, got {omega}"),
            ));
        }
        if !omega0.is_finite() {
            return Err(Error::param(
                "omega0",
                format!("must be finite, got {omega0}"),
            ));
        }
        let delta = omega0 - omega;
        let big_g = 8f64.sqrt() * g;
        let big_omega = delta.hypot(big_g);
        Ok(ModelParams {
            g,
            omega,
            omega0,
            delta,
            big_g,
            big_omega,
        })
    }

    /// Resonant parameters (`omega = omega0`).
    pub fn resonant(g: f64, omega: f64) -> Result<Self> {
        Self::new(g, omega, omega)
    }

    /// Builds parameters from the coupling, the cavity frequency and the
    /// detuning `Δ = ω₀ − ω`.
    pub fn with_detuning(g: f64, omega: f64, delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::param(
                "delta",
                format!("must be finite, got {delta}"),
            ));
        }
        Self::new(g, omega, omega + delta)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Detuning `Δ = ω₀ − ω`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Resonant two-atom Rabi frequency `G = √8 g`.
    pub fn big_g(&self) -> f64 {
        self.big_g
    }

    /// Detuned Rabi frequency `Ω = √(Δ² + G²)`.
    pub fn big_omega(&self) -> f64 {
        self.big_omega
    }

    pub fn is_resonant(&self) -> bool {
        self.delta == 0.0
    }

    /// Converts the dimensionless time `Gt/π` into time `t`.
    ///
    /// This and [`ModelParams::tau_from_time`] are the only places the two
    /// time axes are related.
    pub fn time_from_tau(&self, tau: f64) -> f64 {
        tau * std::f64::consts::PI / self.big_g
    }

    /// Converts time `t` into the dimensionless time `Gt/π`.
    pub fn tau_from_time(&self, t: f64) -> f64 {
        t * self.big_g / std::f64::consts::PI
    }
}

/// Atomic level of a single two-level atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    Ground,
    Excited,
}

impl Level {
    fn excitations(self) -> u32 {
        match self {
            Level::Ground => 0,
            Level::Excited => 1,
        }
    }
}

/// Bare product ket `|photons, atom1, atom2>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BasisKet {
    pub photons: u32,
    pub atom1: Level,
    pub atom2: Level,
}

impl BasisKet {
    pub const fn new(photons: u32, atom1: Level, atom2: Level) -> Self {
        BasisKet {
            photons,
            atom1,
            atom2,
        }
    }

    /// Eigenvalue of `M = a†a + T_ee(1) + T_ee(2)` on this ket.
    pub fn excitations(&self) -> u32 {
        self.photons + self.atom1.excitations() + self.atom2.excitations()
    }
}

impl fmt::Display for BasisKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = |s: Level| if s == Level::Excited { 'e' } else { 'g' };
        write!(f, "|{},{},{}>", self.photons, l(self.atom1), l(self.atom2))
    }
}

/// Real-symmetric Hamiltonian block of fixed excitation number `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationBlock {
    m: u32,
    basis: Vec<BasisKet>,
    /// Row-major, `dim × dim`.
    matrix: Vec<f64>,
}

impl ExcitationBlock {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisKet] {
        &self.basis
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.dim() + col]
    }

    /// Row-major matrix entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.matrix
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix
            .chunks(self.dim())
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.entry(i, j) == self.entry(j, i)))
    }
}

/// Builds the Hamiltonian block for excitation number `m`.
///
/// Block rows follow `|m−2,e,e>, |m−1,e,g>, |m−1,g,e>, |m,g,g>`; for `m = 1`
/// the doubly excited ket is absent and for `m = 0` only `|0,g,g>` remains.
pub fn build_block(m: u32, params: &ModelParams) -> ExcitationBlock {
    use Level::{Excited as E, Ground as G};

    let (w, w0, g) = (params.omega, params.omega0, params.g);
    let mf = f64::from(m);
    match m {
        0 => ExcitationBlock {
            m,
            basis: vec![BasisKet::new(0, G, G)],
            matrix: vec![0.0],
        },
        1 => {
            let basis = vec![
                BasisKet::new(0, E, G),
                BasisKet::new(0, G, E),
                BasisKet::new(1, G, G),
            ];
            #[rustfmt::skip]
            let matrix = vec![
                w0,  0.0, g,
                0.0, w0,  g,
                g,   g,   w,
            ];
            ExcitationBlock { m, basis, matrix }
        }
        _ => {
            let basis = vec![
                BasisKet::new(m - 2, E, E),
                BasisKet::new(m - 1, E, G),
                BasisKet::new(m - 1, G, E),
                BasisKet::new(m, G, G),
            ];
            let ee = (mf - 2.0) * w + 2.0 * w0;
            let single = (mf - 1.0) * w + w0;
            let lower = (mf - 1.0).sqrt() * g;
            let upper = mf.sqrt() * g;
            #[rustfmt::skip]
            let matrix = vec![
                ee,    lower,  lower,  0.0,
                lower, single, 0.0,    upper,
                lower, 0.0,    single, upper,
                0.0,   upper,  upper,  mf * w,
            ];
            ExcitationBlock { m, basis, matrix }
        }
    }
}

/// Dense Hamiltonian on the direct sum of blocks `0..=m` together with the
/// diagonal excitation-number operator on the same basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHamiltonian {
    dim: usize,
    hamiltonian: Vec<f64>,
    excitation: Vec<f64>,
}

impl TruncatedHamiltonian {
    pub fn assemble(m_max: u32, params: &ModelParams) -> Self {
        let blocks: Vec<_> = (0..=m_max).map(|m| build_block(m, params)).collect();
        let dim = blocks.iter().map(ExcitationBlock::dim).sum();
        let mut hamiltonian = vec![0.0; dim * dim];
        let mut excitation = Vec::with_capacity(dim);
        let mut offset = 0;
        for block in &blocks {
            let n = block.dim();
            for i in 0..n {
                for j in 0..n {
                    hamiltonian[(offset + i) * dim + offset + j] = block.entry(i, j);
                }
            }
            excitation.extend(block.basis().iter().map(|k| f64::from(k.excitations())));
            offset += n;
        }
        TruncatedHamiltonian {
            dim,
            hamiltonian,
            excitation,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian_entry(&self, row: usize, col: usize) -> f64 {
        self.hamiltonian[row * self.dim + col]
    }

    /// Overwrites a Hamiltonian entry and its transpose partner.
    pub fn set_coupling(&mut self, row: usize, col: usize, value: f64) {
        self.hamiltonian[row * self.dim + col] = value;
        self.hamiltonian[col * self.dim + row] = value;
    }

    /// Entry-wise `[H, M]`, row-major.
    pub fn commutator(&self) -> Vec<f64> {
        let n = self.dim;
        let mut m_dense = vec![0.0; n * n];
        for (i, &x) in self.excitation.iter().enumerate() {
            m_dense[i * n + i] = x;
        }
        let hm = matmul(&self.hamiltonian, &m_dense, n);
        let mh = matmul(&m_dense, &self.hamiltonian, n);
        hm.iter().zip(&mh).map(|(a, b)| a - b).collect()
    }

    /// True iff every entry of `[H, M]` is below `tol` in magnitude.
    pub fn commutes_with_excitation(&self, tol: f64) -> bool {
        self.commutator().iter().all(|c| c.abs() <= tol)
    }
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Absolute entry-wise tolerance for the commutator check.
pub const COMMUTATOR_TOL: f64 = 1e-12;

/// Checks that `[H, M] = 0` on the truncated space of blocks `0..=m`.
pub fn verify_excitation_conservation(m: u32, params: &ModelParams) -> bool {
    TruncatedHamiltonian::assemble(m, params).commutes_with_excitation(COMMUTATOR_TOL)
}
