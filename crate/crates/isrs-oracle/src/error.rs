use isrs_model::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("Hilbert space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("block of size {size} exceeds the dense cap {cap}")]
    BlockCap { size: usize, cap: usize },
    #[error("state has length {got}, basis has dimension {expected}")]
    BasisMismatch { expected: usize, got: usize },
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("singular matrix in LU solve")]
    Singular,
    #[error("invalid study: {0}")]
    Study(String),
}
