use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Process exit status for each error class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 1;
    pub const IO: i32 = 2;
    pub const USAGE: i32 = 64;
}

/// Where in an input file a parse error was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Line(u64),
    Byte(u64),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Byte(n) => write!(f, "byte {n}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {at}: {message}", path.display())]
    Parse {
        path: PathBuf,
        at: Location,
        message: String,
    },

    /// Well-formed input that violates a data invariant.
    #[error("{0}")]
    Validation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) => exit::VALIDATION,
            CliError::Io { .. } => exit::IO,
            CliError::Usage(_) => exit::USAGE,
        }
    }

    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn parse(path: impl AsRef<Path>, at: Location, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.as_ref().to_path_buf(),
            at,
            message: message.into(),
        }
    }
}

impl From<shapesig::Error> for CliError {
    fn from(e: shapesig::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
