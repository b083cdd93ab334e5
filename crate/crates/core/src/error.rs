use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("objective index {index} out of range for {m} objectives")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("anchors are affinely dependent: rank {rank}, need {needed}")]
    AffinelyDependent { rank: usize, needed: usize },

    #[error("step size {alpha} at position {k} violates the cap 0 <= alpha <= {cap}")]
    StepCap { k: usize, alpha: f64, cap: f64 },

    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("solver did not converge: {0}")]
    Convergence(String),

    #[error("extremal search failed: {0}")]
    ExtremalSearch(String),

    #[error("iterate became non-finite at step {step} of {method}")]
    Divergence { method: String, step: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl LabError {
    /// True for failures of an iterative solver or extremal search, as opposed
    /// to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            LabError::Convergence(_) | LabError::ExtremalSearch(_) | LabError::Divergence { .. }
        )
    }
}

pub(crate) fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(LabError::NonFinite(what.to_string()))
    }
}
