//! CLI error type and the process exit-code contract.

use std::path::PathBuf;

use thiserror::Error;

/// Exit codes: 0 success, 1 failed check, 2 usage or configuration
/// error, 3 resource cap exceeded, 4 numerical failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qps_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(qps_core::Error::CapExceeded { .. }) => 3,
            CliError::Core(qps_core::Error::Numerical(_)) => 4,
            _ => 2,
        }
    }
}
