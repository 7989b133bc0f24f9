use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{0}")]
    Schema(String),

    #[error(transparent)]
    Domain(tmss_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    /// Process exit code: 2 I/O, 3 input schema, 4 domain.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 2,
            CliError::Schema(_) => 3,
            CliError::Domain(_) => 4,
        }
    }
}

impl From<tmss_core::Error> for CliError {
    fn from(e: tmss_core::Error) -> Self {
        match e {
            tmss_core::Error::Schema(msg) => CliError::Schema(msg),
            other => CliError::Domain(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
