//! Error type shared across the crate.

/// Errors produced by geometry construction, band building and the solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A dictionary column has zero general norm; it cannot be normalized.
    #[error("dictionary column {0} has zero norm")]
    ZeroNormColumn(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    /// The operation needs an empirical design matrix but the geometry only
    /// carries an analytic Gram matrix.
    #[error("operation requires an empirical design: {0}")]
    ModeError(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// The Gram matrix failed the symmetry or positive-semidefiniteness check.
    #[error("invalid gram matrix: {0}")]
    InvalidGram(String),

    #[error("solver did not converge within {0} iterations")]
    NotConverged(usize),

    /// The slab system admits no solution (only possible with zero radii).
    #[error("constraint system is infeasible")]
    Infeasible,

    /// The linear program is unbounded. Cannot occur for the slab programs
    /// solved here; surfaced for completeness.
    #[error("linear program is unbounded")]
    Unbounded,

    /// The Gram matrix is not the identity, which this bound requires.
    #[error("gram matrix is not orthogonal: {0}")]
    NotOrthogonal(String),

    #[error("cholesky factorization failed: {0}")]
    CholeskyFailure(String),

    #[error("{path}: parse error at row {row}, column {col}: {msg}")]
    CsvParse {
        path: String,
        row: usize,
        col: usize,
        msg: String,
    },

    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
