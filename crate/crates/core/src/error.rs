use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("real-field matrix has imaginary parts up to {max_imag:e}")]
    ComplexEntriesInRealField { max_imag: f64 },
    #[error("matrix is not idempotent: ‖G²−G‖ = {residual:e}")]
    NotIdempotent { residual: f64 },
    #[error("trace differs from rank: |tr G − K| = {gap:e}")]
    TraceMismatch { gap: f64 },
    #[error("rank {k} out of range for N = {n}")]
    BadRank { n: usize, k: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for N = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("chart pivot block is singular (condition number {condition:e})")]
    SingularPivotBlock { condition: f64 },
    #[error("chart Gram matrix A A* is numerically singular")]
    SingularGram,
    #[error("frame is not Parseval: ‖Σ f f* − I‖ = {residual:e}")]
    NotParseval { residual: f64 },
    #[error("bad row selection: {0}")]
    BadSelection(String),
    #[error("degenerate random draw after {attempts} attempts")]
    DegenerateDraw { attempts: usize },
    #[error("unknown variant `{0}`")]
    UnknownVariant(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T, E = FrameError> = std::result::Result<T, E>;
