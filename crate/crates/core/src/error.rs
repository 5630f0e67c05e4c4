use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.6e} below -{threshold:.3e}")]
    NotPsd { min_eigenvalue: f64, threshold: f64 },

    #[error("matrix is singular within tolerance (reciprocal condition {rcond:.3e})")]
    Singular { rcond: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{method} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(
        "no feasible witness after {} iterations (best residual {:.3e})",
        .0.iterations,
        .0.best_residual
    )]
    Infeasible(Box<crate::ando::InfeasibilityReport>),
}
