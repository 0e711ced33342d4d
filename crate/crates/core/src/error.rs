use thiserror::Error;

/// Errors raised by the geometry and metric operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Input(String),
    #[error("unknown point id `{0}`")]
    UnknownPoint(String),
    #[error("quadruple ({0}) is not admissible: an entry occurs three or more times")]
    Inadmissible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("convergence not detected: {0}")]
    ConvergenceNotDetected(String),
    #[error("no homothety moves the first point to the second: {0}")]
    NoHomothety(String),
    #[error("descent terminated: the subspace has dimension 0")]
    DescentTerminated,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
