use thiserror::Error;

/// Errors produced by the linear algebra, state, scheme and CLI layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("qubit index {index} out of range for {num_qubits}-qubit register")]
    IndexOutOfRange { index: usize, num_qubits: usize },

    #[error("duplicate qubit index {0}")]
    DuplicateIndex(usize),

    #[error("operator is not unitary within tolerance {tol:e}")]
    NotUnitary { tol: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
