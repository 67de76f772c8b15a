use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate cat manifold: two-photon drive magnitude is zero")]
    DegenerateManifold,

    #[error("divergent quantity: {0}")]
    Divergent(String),

    #[error("truncation dimension {dim} too small: tail mass {tail:e}")]
    Truncation { dim: usize, tail: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("kernel has dimension {0}, expected 1")]
    DegenerateKernel(usize),

    #[error("singular matrix")]
    Singular,

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("winding number undetermined: {0}")]
    Winding(String),
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParameter { .. } | Error::DegenerateManifold | Error::DimensionMismatch(..)
        )
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
