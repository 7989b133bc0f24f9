use thiserror::Error;

/// Errors raised by the workbench library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Schema(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("bright-limit approximation invalid: mode {mode} has zero displacement")]
    NotBright { mode: usize },

    #[error("non-physical parameter combination: {0}")]
    NonPhysical(String),

    #[error("backtracked noise non-physical: {0}")]
    BacktrackNonPhysical(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("derivative cross-check failed: analytic {analytic}, finite difference {numeric}")]
    DerivativeMismatch { analytic: f64, numeric: f64 },

    #[error("SNR=1 not bracketed by the ramp (fitted SNR spans {lo:.3}..{hi:.3})")]
    SnrNotBracketed { lo: f64, hi: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
