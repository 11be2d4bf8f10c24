use thiserror::Error;

/// Errors raised by the complex builders, solvers and simulators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HodgeError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension {k} out of range (valid: {min}..={max})")]
    DimensionOutOfRange { k: usize, min: usize, max: usize },

    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("empty data")]
    EmptyData,

    #[error("unbalanced comparison data: {0}")]
    Unbalanced(String),

    #[error("no {k}-simplices in the complex")]
    NoSimplices { k: usize },

    #[error("zero signal: cannot normalize")]
    ZeroSignal,

    #[error("boundary matrix B_{k} has no nonzero singular value")]
    ZeroBoundary { k: usize },

    #[error("kappa {kappa} must exceed sqrt(n)/zeta_min = {lower}")]
    KappaTooSmall { kappa: f64, lower: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("polynomial certificate failed: {0}")]
    CertificateFailed(String),

    #[error("filter parity violation: {0}")]
    ParityViolation(String),

    #[error("filter sup-norm {sup} exceeds 1")]
    FilterNotBounded { sup: f64 },

    #[error("postselection impossible: success probability {probability:e}")]
    PostselectionImpossible { probability: f64 },

    #[error("{n} qubits exceed the dense Dirac limit of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("projected encoding mismatch for k={k}: max entry error {max_error:e}")]
    EncodingMismatch { k: usize, max_error: f64 },

    #[error("simplex index {index} out of range for {count} simplices")]
    IndexOutOfRange { index: usize, count: usize },
}

pub type Result<T> = std::result::Result<T, HodgeError>;
