use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An iterate lost column rank and cannot be orthogonalized.
    #[error("degenerate iterate: {0}")]
    Degenerate(String),

    /// The coupling least-squares residual stagnated above tolerance;
    /// the constraint geometry admits no solution.
    #[error("subproblem infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
