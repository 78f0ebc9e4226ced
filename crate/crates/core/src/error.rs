use thiserror::Error;

/// Errors raised across the mapping, compilation and simulation pipeline.
#[derive(Debug, Error)]
pub enum SbmError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix must be non-empty")]
    Empty,

    #[error("matrix is not Hermitian: max |M - M^dagger| = {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary: max |U^dagger U - I| = {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),

    #[error("eigenvalue {value:.3e} is below the PSD clamp threshold")]
    NegativeEigenvalue { value: f64 },

    #[error("Fock cutoff {got} too small, need at least {required}")]
    CutoffTooSmall { required: usize, got: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("map is not a contraction: largest singular value {sigma_max:.12}")]
    NonContractive { sigma_max: f64 },

    #[error("invalid population vector: {0}")]
    InvalidDistribution(String),

    #[error("Hilbert-space dimension {dim} exceeds the dense cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("thermal ensemble truncation reached weight {reached:.3e} of required {required:.3e}")]
    EnsembleTruncation { reached: f64, required: f64 },

    #[error("unsupported circuit width {0}; only 1 and 2 qubits are handled")]
    UnsupportedWidth(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = SbmError> = std::result::Result<T, E>;
