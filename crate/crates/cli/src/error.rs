use std::path::PathBuf;

use ctau::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ASSERTION: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const INVALID_OBJECT: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("invalid quantum object: {0}")]
    InvalidObject(CoreError),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => exit::PARSE,
            CliError::InvalidObject(_) => exit::INVALID_OBJECT,
            CliError::Assertion(_) => exit::ASSERTION,
            CliError::Io { .. } => exit::IO,
            CliError::Core(e) => match e {
                CoreError::BoundViolation { .. }
                | CoreError::NoConvergence { .. }
                | CoreError::UnexpectedComplexSpectrum { .. } => exit::ASSERTION,
                _ => exit::PARSE,
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if e.is_invalid_object() {
            CliError::InvalidObject(e)
        } else if let CoreError::Serialization(msg) = e {
            CliError::Parse(msg)
        } else {
            CliError::Core(e)
        }
    }
}
