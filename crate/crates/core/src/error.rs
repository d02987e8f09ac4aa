use thiserror::Error;

/// Errors surfaced by construction, linear algebra, and solver-backed maps.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} must be finite")]
    NonFinite { what: &'static str },

    #[error("invalid {what}: {why}")]
    InvalidParameter { what: &'static str, why: String },

    #[error("operator is not monotone: M + M^T has eigenvalue {eigenvalue}")]
    NotMonotone { eigenvalue: f64 },

    #[error("matrix is singular or ill-conditioned (condition estimate {condition_estimate:.3e})")]
    Singular { condition_estimate: f64 },

    #[error("eigenvalue sweep did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:.3e})")]
    EigenNonConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("resolvent solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    SolverNonConvergence { residual: f64, iterations: usize },

    #[error("empty {what}")]
    Empty { what: &'static str },
}

pub type Result<T> = std::result::Result<T, CoreError>;
