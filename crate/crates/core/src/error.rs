use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("size cap exceeded: {0}")]
    TooLarge(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("state is not normalized (norm deviation {0:e})")]
    NotNormalized(f64),
    #[error("invalid qubit selection: {0}")]
    BadQubits(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("basis is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("capacity {requested} is not admissible (maximum {admissible})")]
    Inadmissible { requested: usize, admissible: usize },
    #[error("factorization condition fails for capacity {0}")]
    ConditionFailed(usize),
    #[error("outcome is unreachable (probability {0:e})")]
    Unreachable(f64),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("eigensolver did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;
