use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular or vectors are linearly dependent")]
    Rank,

    #[error("expected integer entries")]
    NotIntegral,

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("instance generation exhausted after {0} attempts")]
    GenerationExhausted(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
