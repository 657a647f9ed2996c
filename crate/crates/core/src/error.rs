use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("index ({k}, {l}) outside the {m}x{n} grid")]
    IndexOutOfRange { k: usize, l: usize, m: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("frame size {mn} exceeds the dense-matrix cap {cap}")]
    DenseCapExceeded { mn: usize, cap: usize },

    #[error("half-bandwidth {b} too large for frame size {mn} (need 2b < MN)")]
    InvalidBandwidth { b: usize, mn: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not positive definite (pivot {0})")]
    NotPositiveDefinite(usize),

    #[error("matrix is singular (pivot {0})")]
    Singular(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
