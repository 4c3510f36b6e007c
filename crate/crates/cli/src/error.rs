use std::path::{Path, PathBuf};

use sam_denoise::error::Error as CoreError;

/// Exit codes are part of the scripting contract.
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DATA: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Data(_) => EXIT_DATA,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Param(_)
            | CoreError::Spec(_)
            | CoreError::Gate { .. }
            | CoreError::Index { .. } => CliError::Usage(e.to_string()),
            // Unreadable or inconsistent file contents are data errors;
            // only failing to open or write a file is an I/O error.
            CoreError::Format(_)
            | CoreError::Truncated { .. }
            | CoreError::InvalidHeader(_)
            | CoreError::Shape(_) => CliError::Data(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}
