//! CLI error wrapper carrying the process exit code.

use std::fmt;

/// Exit code 1 for data/I-O problems, 2 for non-convergence.
#[derive(Debug)]
pub enum CliError {
    Data(blrs_core::Error),
    NonConvergence { max_iter: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Data(_) => 1,
            CliError::NonConvergence { .. } => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Data(e) => write!(f, "{e}"),
            CliError::NonConvergence { max_iter } => {
                write!(
                    f,
                    "fit did not converge within max_iter={max_iter} iterations"
                )
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<blrs_core::Error> for CliError {
    fn from(e: blrs_core::Error) -> Self {
        CliError::Data(e)
    }
}
