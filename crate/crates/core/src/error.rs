use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid ambiguity set: {0}")]
    InvalidSet(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("test function is not integrable against {member}: {reason}")]
    NonIntegrable { member: String, reason: String },
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),
    #[error("mean does not converge: {0}")]
    NotConvergent(String),
    #[error("dimension {0} exceeds the supported maximum of 4")]
    DimensionTooLarge(usize),
    #[error("target {target} is outside the mean interval [{lower}, {upper}]")]
    TargetOutOfRange { target: f64, lower: f64, upper: f64 },
    #[error("target {target:?} is outside the mean set (distance {distance})")]
    TargetOutsideM { target: Vec<f64>, distance: f64 },
    #[error("state space of {states} states exceeds the limit {limit}")]
    StateSpaceTooLarge { states: usize, limit: usize },
    #[error("atom {value} is not a multiple of the lattice quantum {quantum}")]
    NonLattice { value: f64, quantum: f64 },
    #[error("instance too large for brute force: {0}")]
    TooLargeForBruteForce(String),
    #[error("mean {mu:?} is not attainable as a mixture of member means")]
    MuNotAttainable { mu: Vec<f64> },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
