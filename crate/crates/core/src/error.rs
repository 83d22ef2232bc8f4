use thiserror::Error;

/// Errors surfaced by constructors and operations with validated inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}, expected one of 2, 4, 8")]
    UnsupportedDim(usize),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("operator is not a valid density matrix: {0}")]
    NotDensity(String),
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("Bloch vector has norm {0} > 1")]
    OutsideBlochBall(f64),
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
