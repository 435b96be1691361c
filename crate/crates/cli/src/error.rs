use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VALIDATION_FAILED: i32 = 2;
    pub const NON_CONVERGENCE: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// Malformed or invalid configuration; `location` names the file.
    #[error("{location}: {source}")]
    Config { location: String, source: fdmix::Error },

    #[error(transparent)]
    Core(#[from] fdmix::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("validation failed: {0}")]
    ValidationFailed(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ValidationFailed(_) => exit::VALIDATION_FAILED,
            CliError::Core(e) | CliError::Config { source: e, .. } if e.is_non_convergence() => exit::NON_CONVERGENCE,
            _ => exit::USAGE,
        }
    }
}
