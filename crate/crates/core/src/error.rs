use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("spectrum is not Hermitian: relative deviation {deviation:.3e} exceeds 1e-10")]
    NotHermitian { deviation: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("exponential weight overflows at wavenumber {zeta}")]
    Overflow { zeta: f64 },

    #[error("cutoff-weighted sample is not supported inside the time window (edge magnitude {edge:.3e})")]
    SupportViolation { edge: f64 },

    #[error("unsupported mixed-norm exponent {0}")]
    UnsupportedExponent(f64),

    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error(
        "Picard iteration is not contracting (ratio {ratio:.3} at iteration {iteration}); \
         shrink the time window until T^eps <= 1/(4 C R^(2p))"
    )]
    NonContraction { iteration: usize, ratio: f64 },

    #[error("Picard iteration did not reach tolerance within {0} iterations")]
    PicardMaxIters(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parameter outside the estimate's hypothesis range: {0}")]
    ThresholdViolation(String),

    #[error("zero denominator with nonzero numerator {numerator:.3e}")]
    ZeroDenominator { numerator: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
