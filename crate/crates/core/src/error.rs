use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument lies within the pole tolerance of a non-positive integer.
    #[error("pole: {z} is within {tolerance:e} of the pole at {pole}")]
    Pole { z: Complex64, pole: i64, tolerance: f64 },

    /// Result magnitude exceeds the double-precision range.
    #[error("overflow: gamma({z}) exceeds the double-precision range")]
    Overflow { z: Complex64 },

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Point on (or numerically too close to) the branch cut `[0, inf)` of `(-z)^(-s)`.
    #[error("branch error: {z} lies on the cut [0, inf)")]
    Branch { z: Complex64 },

    /// No truncation height satisfies the requested tolerance.
    #[error("tail error: contour truncation cannot reach tolerance {tol:e} for z = {z} ({reason})")]
    Tail { z: Complex64, tol: f64, reason: String },

    /// The a-priori truncation index exceeds the configured maximum.
    #[error("slow convergence: {required} terms required, limit is {limit}")]
    SlowConvergence { required: usize, limit: usize },

    /// Not enough coefficient data for an estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A finite Taylor representation ran out of coefficients.
    #[error("truncation: {needed} Taylor coefficients needed, {available} available")]
    Truncation { needed: usize, available: usize },

    /// Point outside the Mittag-Leffler star of the observed solution.
    #[error("star violation: t = {t} lies outside the star")]
    StarViolation { t: Complex64 },

    /// The operator-norm inequality failed on a witness element.
    #[error("bound violation: ratio {ratio} exceeds 1 (omega1 = {omega1}, omega2 = {omega2})")]
    BoundViolation {
        ratio: f64,
        omega1: f64,
        omega2: f64,
        witness: Vec<Complex64>,
    },

    /// Malformed input data.
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag used in output tables.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Pole { .. } => "PoleError",
            Error::Overflow { .. } => "OverflowError",
            Error::Domain(_) => "DomainError",
            Error::Branch { .. } => "BranchError",
            Error::Tail { .. } => "TailError",
            Error::SlowConvergence { .. } => "SlowConvergence",
            Error::InsufficientData(_) => "InsufficientData",
            Error::Truncation { .. } => "TruncationError",
            Error::StarViolation { .. } => "StarViolation",
            Error::BoundViolation { .. } => "BoundViolation",
            Error::Invalid(_) => "InvalidInput",
        }
    }
}
