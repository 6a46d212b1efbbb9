//! Crate-wide error type.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv parse error at line {line}, column {column}: {message}")]
    CsvParse {
        line: u64,
        column: String,
        message: String,
    },

    #[error("unknown target column {0:?}")]
    UnknownTargetColumn(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("all feature columns are constant; nothing to fit")]
    AllColumnsConstant,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error(
        "eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_diag:.3e})"
    )]
    EigenNonConvergence { sweeps: usize, off_diag: f64 },

    #[error("gram matrix is not positive semi-definite: eigenvalue {0:.3e}")]
    IndefiniteGram(f64),

    #[error("degenerate problem: {0}")]
    Degenerate(String),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("numerically inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("matrix is numerically singular: {0}")]
    Singular(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("model file error: {0}")]
    ModelFormat(String),
}
