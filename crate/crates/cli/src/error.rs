//! Error type shared by the command-line layer.
//!
//! The process exit code is derived from the variant: [`CliError::Usage`]
//! maps to exit code 2 (bad invocation), everything else to exit code 1
//! (data or runtime failure). Successful runs exit 0.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while loading inputs, resolving configuration, or
/// executing a subcommand.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum CliError {
    /// The invocation itself is wrong (bad flag value, contradictory
    /// options, malformed config entry). Mapped to exit code 2.
    #[error("{0}")]
    Usage(String),

    /// Filesystem access failed for the given path.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file exists but its contents cannot be understood at all
    /// (missing required columns, unreadable header, invalid JSON).
    /// Individual bad rows are reported as diagnostics, not as this error.
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    /// A domain-level failure bubbled up from the core library.
    #[error(transparent)]
    Core(#[from] greenride_core::Error),

    /// The inputs parsed but do not form a usable dataset
    /// (for example no emission source for any vehicle).
    #[error("{0}")]
    Data(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Convenience constructor for [`CliError::Io`].
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Convenience constructor for [`CliError::Parse`].
    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
