use thiserror::Error;

/// Errors produced by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix has {expected} entries declared but {found} supplied")]
    BadShape { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (relative residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("A is numerically zero")]
    ZeroOperator,

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("operator does not admit an A-adjoint (membership residual {residual:e})")]
    NotInBA { residual: f64 },

    #[error("equality condition not met (residual {residual:e})")]
    ConditionNotMet { residual: f64 },

    #[error("unknown operator kind `{0}`")]
    UnknownKind(String),

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("every sample had vanishing A-seminorm")]
    DegenerateSample,
}

pub type Result<T> = std::result::Result<T, Error>;
