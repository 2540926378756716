use thiserror::Error;

/// Errors raised by the library.
///
/// `Input` covers contract violations by the caller, `Numerical` marks a
/// numeric routine that could not reach its residual target, and
/// `Verification` carries a counterexample found by a checking routine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("numerical failure in {routine}: best residual {residual:.3e}")]
    Numerical { routine: &'static str, residual: f64 },

    #[error("post-measurement branch {outcome} is mixed on AB (second Schmidt weight {weight:.3e})")]
    MixedBranch { outcome: usize, weight: f64 },

    #[error("verification failed: {what} (gap {gap:.3e})")]
    Verification {
        what: String,
        gap: f64,
        state: Option<Box<crate::PureState>>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
