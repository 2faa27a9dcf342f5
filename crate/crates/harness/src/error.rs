use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("could not parse {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("solver error: {0}")]
    Solver(#[from] gmsurf_core::Error),
    #[error("study aborted: {0}")]
    StudyAborted(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("could not serialize manifest: {0}")]
    Manifest(#[from] toml::ser::Error),
}

impl HarnessError {
    /// Process exit code for the CLI: 2 config, 3 solver, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::ConfigParse { .. } => 2,
            HarnessError::Solver(_) | HarnessError::StudyAborted(_) => 3,
            HarnessError::Io { .. } | HarnessError::Csv(_) | HarnessError::Manifest(_) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Geometry problems found while building a preset are configuration
    /// errors, not solver failures.
    pub(crate) fn geometry(e: gmsurf_core::Error) -> Self {
        HarnessError::Config(e.to_string())
    }
}
