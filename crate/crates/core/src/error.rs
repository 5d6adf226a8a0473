use thiserror::Error;

pub type Result<T> = std::result::Result<T, SqgError>;

#[derive(Debug, Error)]
pub enum SqgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("Hermitian symmetry violated: imaginary residue {residue:.3e} exceeds {tolerance:.1e} relative")]
    HermitianViolation { residue: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field has nonzero mean {mean:.3e}; {context} requires mean-free input")]
    NonzeroMean { mean: f64, context: &'static str },

    #[error("overflow guard ({guard}): exponent {exponent:.4} exceeds cap {cap}")]
    OverflowGuard {
        guard: &'static str,
        exponent: f64,
        cap: f64,
    },

    #[error("cost cap: {terms} terms requested, cap is {cap}")]
    CostCap { terms: u64, cap: u64 },

    #[error("CFL guard: Courant number {courant:.3} exceeds hard limit 2 at t = {t:.6}")]
    Cfl { courant: f64, t: f64 },

    #[error("non-finite state detected at t = {t:.6}")]
    NonFinite { t: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("insufficient stored states: {0}")]
    InsufficientStates(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SqgError {
    /// Runtime guards (overflow, CFL, NaN, cost) as opposed to bad input.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            SqgError::OverflowGuard { .. }
                | SqgError::Cfl { .. }
                | SqgError::NonFinite { .. }
                | SqgError::CostCap { .. }
        )
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        SqgError::InvalidParameter(msg.into())
    }
}
