use std::path::PathBuf;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] specpow_core::Error),

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: specpow_core::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("could not serialize output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Stable identifier printed as `error[<code>]`.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) | CliError::File { source: e, .. } => e.code(),
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::Json(_) => "serialize",
        }
    }
}
