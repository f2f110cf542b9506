use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("expected a state in the {expected:?} frame, got {found:?}")]
    WrongFrame {
        expected: crate::dynamics::Frame,
        found: crate::dynamics::Frame,
    },

    #[error("party index {0} out of range (expected 0, 1 or 2)")]
    InvalidParty(usize),

    #[error("party pair ({0}, {1}) must name two distinct parties")]
    SameParty(usize, usize),

    #[error("empty range [{start}, {end}]")]
    EmptyRange { start: f64, end: f64 },

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
