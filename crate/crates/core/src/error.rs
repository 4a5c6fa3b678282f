use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("inputs do not span the operator space (rank {rank} of {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("states are linearly dependent; no virtual cloning map exists")]
    NotClonable,

    #[error("states {0} and {1} are identical")]
    IdenticalStates(usize, usize),

    #[error("problem too large: choi dimension {dim} exceeds {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("SDP solver did not reach optimality: {0}")]
    Solver(String),

    #[error("negative branch probability {0:.3e}; a non-CPTP branch reached the sampler")]
    NegativeProbability(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
