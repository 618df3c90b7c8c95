use thiserror::Error;

/// Errors raised by the laboratory. Every numerical failure is reported,
/// never folded into a silent value.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    #[error("invalid domain specification: {0}")]
    InvalidSpec(String),

    #[error("point lies on the ridge set (reduced coordinate {t})")]
    OnRidge { t: f64 },

    #[error("point lies at a geometric singularity (|x| = {radius})")]
    AtSingularity { radius: f64 },

    #[error("ball is not compactly contained in the domain")]
    BallNotInterior,

    #[error("point has wrong dimension: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("integrand is not integrable: exponent {alpha} <= -1 at the endpoint")]
    NonIntegrable { alpha: f64 },

    #[error("quadrature did not converge after {panels} panels (error {error:e})")]
    NonConvergence { panels: usize, error: f64 },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("domain has infinite inner radius")]
    InfiniteInradius,

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for HardyError {
    fn from(err: std::io::Error) -> Self {
        HardyError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HardyError>;
