use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Pauli character {ch:?} at position {position}")]
    InvalidPauliChar { position: usize, ch: char },

    #[error("invalid binary Pauli string {0:?}, expected \"z|x\"")]
    InvalidBinaryString(String),

    #[error("spin count mismatch: {left} vs {right}")]
    SpinMismatch { left: usize, right: usize },

    #[error("spin count must be between 1 and {max}, got {n}")]
    SpinCount { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not traceless: {0}")]
    NotTraceless(String),

    #[error("group generation over {count} generators exceeds the enumeration cap of {cap}")]
    GeneratorCapExceeded { count: usize, cap: usize },

    #[error("monomial enumeration exceeds the cap of {cap} monomials")]
    MonomialCapExceeded { cap: usize },

    #[error("model is not a pure Pauli model: {0}")]
    NotPurePauli(String),

    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("invalid state specification: {0}")]
    InvalidState(String),

    #[error("invalid model specification: {0}")]
    InvalidModel(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid block specification: {0}")]
    InvalidBlocks(String),

    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
