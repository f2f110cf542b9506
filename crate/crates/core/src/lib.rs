//! Entanglement sharing between two identical two-level atoms and a
//! single cavity mode in the one-excitation sector.
//!
//! * [`model`]: parameters and the excitation-number block Hamiltonian.
//! * [`dynamics`]: closed-form and Runge–Kutta amplitudes.
//! * [`entanglement`]: normalized Schmidt weight, one-to-other entanglement,
//!   concurrences and monogamy.
//! * [`analysis`]: `Y_S(τ)` curves, freezing/thawing intervals, sweeps.
//! * [`verify`]: invariant suites used by `cavityshare verify`.
//!
//! User-facing time is the dimensionless `τ = Gt/π` with `G = √8 g`.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod model;
pub mod verify;

pub use analysis::{FreezeInterval, FreezeKind, SweepGrid};
pub use dynamics::{
    AmplitudeState, Frame, InitialCondition, NormalizedTriple, SolutionCoefficients,
};
pub use entanglement::{EntanglementTriple, SchmidtPair};
pub use error::{Error, Result};
pub use model::{ExcitationBlock, ModelParams};
