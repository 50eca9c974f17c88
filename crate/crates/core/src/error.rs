use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("network is not undirected")]
    NotUndirected,
    #[error("spectral condition violated: alpha * lambda = {alpha} * {lambda} >= 1")]
    SpectralConditionViolated { lambda: f64, alpha: f64 },
    #[error("linear system is singular or the solve residual {residual:e} exceeds tolerance")]
    SingularSystem { residual: f64 },
    #[error("reduced welfare problem is not strictly concave")]
    ReducedSystemNotConcave,
    #[error("pricing view requires a marginal cost c")]
    MissingCost,
    #[error("invalid deviation: {0}")]
    InvalidDeviation(String),
    #[error("invalid equality classes: {0}")]
    InvalidClasses(String),
    #[error("invalid announcement: {0}")]
    InvalidAnnouncement(String),
    #[error("n = {n} is too large for exhaustive enumeration (max {max})")]
    TooLarge { n: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
