use thiserror::Error;

/// Errors raised by the library.
///
/// Usage errors (bad input, mismatched primes, frames too large) are kept
/// apart from verdict failures so callers can map them to distinct exit
/// codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MraError {
    #[error("values over different primes combined: {0} and {1}")]
    MixedPrimes(u32, u32),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("grid of {size} points exceeds the cap of {cap}")]
    GridTooLarge { size: u128, cap: usize },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible mask: {0}")]
    InfeasibleMask(String),

    #[error("Fourier transform not supported in B_{radius_exp}: nonzero value {magnitude:e} at {witness}")]
    SupportViolation {
        witness: String,
        radius_exp: i32,
        magnitude: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not refinable: time-domain residual {residual:e}")]
    NotRefinable { residual: f64 },

    #[error("shift by {shift} not expressible: residual {residual:e}")]
    ShiftNotExpressible { shift: String, residual: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("wavelet verification failed: {0}")]
    WaveletVerification(String),

    #[error("degenerate generator set: {0}")]
    Degenerate(String),

    #[error("malformed input: {0}")]
    Schema(String),
}

impl MraError {
    /// True for errors caused by how the library was called rather than by
    /// a mathematical verdict on valid input.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            MraError::MixedPrimes(..)
                | MraError::NotPrime(_)
                | MraError::Parse { .. }
                | MraError::GridTooLarge { .. }
                | MraError::InvalidFrame(_)
                | MraError::InvalidArgument(_)
                | MraError::Precondition(_)
                | MraError::Schema(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, MraError>;
