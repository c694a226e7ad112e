use std::path::PathBuf;

use thiserror::Error;

/// Process exit statuses. Usage errors exit with clap's status 2.
pub mod exit {
    pub const IO: u8 = 1;
    pub const CONFIG: u8 = 3;
    pub const NUMERICAL: u8 = 4;
    pub const VALIDATION: u8 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Numerical(ris_core::Error),
    #[error("solution violates its constraints by {0:e}")]
    Constraint(f64),
    #[error("{failed} validation check(s) failed")]
    ValidationFailed { failed: usize },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Csv { .. } => exit::IO,
            CliError::Config(_) => exit::CONFIG,
            CliError::Numerical(_) | CliError::Constraint(_) => exit::NUMERICAL,
            CliError::ValidationFailed { .. } => exit::VALIDATION,
        }
    }
}

impl From<ris_core::Error> for CliError {
    fn from(e: ris_core::Error) -> Self {
        match e {
            ris_core::Error::InvalidParameter { .. } => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
