use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KdError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {requested} exceeds the configured cap of {cap}")]
    DimensionCap { requested: usize, cap: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("basis pair is not informationally complete: |<a_{i}|b_{j}>| = {overlap:.3e}")]
    NotInformationallyComplete { i: usize, j: usize, overlap: f64 },

    #[error("Kraus operators do not form a channel (residual {residual:.3e})")]
    NotAChannel { residual: f64 },

    #[error("basis pair is not mutually unbiased (deviation {deviation:.3e})")]
    NotMub { deviation: f64 },

    #[error("basis pair carries no per-qudit product structure")]
    NonProductBasis,

    #[error("operation requires the per-qudit Fourier basis pair")]
    WrongBasisFamily,

    #[error("operation requires an odd local dimension, got d = {0}")]
    EvenDimension(usize),

    #[error("table is not Hermitian-consistent (imaginary residue {residue:.3e})")]
    NotHermitian { residue: f64 },

    #[error("distribution has zero total weight")]
    ZeroDistribution,

    #[error("path space of size {paths} exceeds the cap of {cap}")]
    PathSpaceTooLarge { paths: f64, cap: f64 },

    #[error("sample budget {required} exceeds the cap of {cap}")]
    BudgetExceeded { required: f64, cap: u64 },

    #[error("estimated denominator {value:.3e} is below 10 standard errors ({stderr:.3e})")]
    DenominatorTooSmall { value: f64, stderr: f64 },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl KdError {
    /// Stable machine-readable tag used in CLI error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            KdError::DimensionMismatch { .. } => "DimensionMismatch",
            KdError::DimensionCap { .. } => "DimensionCap",
            KdError::InvalidMatrix(_) => "InvalidMatrix",
            KdError::NotUnitary { .. } => "NotUnitary",
            KdError::InvalidState(_) => "InvalidState",
            KdError::NotInformationallyComplete { .. } => "NotInformationallyComplete",
            KdError::NotAChannel { .. } => "NotAChannel",
            KdError::NotMub { .. } => "NotMUB",
            KdError::NonProductBasis => "NonProductBasis",
            KdError::WrongBasisFamily => "WrongBasisFamily",
            KdError::EvenDimension(_) => "EvenDimension",
            KdError::NotHermitian { .. } => "NotHermitian",
            KdError::ZeroDistribution => "ZeroDistribution",
            KdError::PathSpaceTooLarge { .. } => "PathSpaceTooLarge",
            KdError::BudgetExceeded { .. } => "BudgetExceeded",
            KdError::DenominatorTooSmall { .. } => "DenominatorTooSmall",
            KdError::InvalidCircuit(_) => "InvalidCircuit",
            KdError::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// True for errors caused by a resource cap rather than invalid input.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(
            self,
            KdError::DimensionCap { .. }
                | KdError::PathSpaceTooLarge { .. }
                | KdError::BudgetExceeded { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, KdError>;
