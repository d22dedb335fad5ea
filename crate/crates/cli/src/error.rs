use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: row {row}: {message}", path.display())]
    Csv {
        path: PathBuf,
        row: u64,
        message: String,
    },
    #[error("{}: missing column {column:?}", path.display())]
    MissingColumn { path: PathBuf, column: String },
    #[error("{}: row {row}, column {column:?}: cannot parse {value:?} as a number", path.display())]
    Parse {
        path: PathBuf,
        row: u64,
        column: String,
        value: String,
    },
    /// Malformed line in one of the plain-text formats (config, mask, metadata).
    #[error("{}: line {line}: {message}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] bnnprune_core::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

/// Pipeline stage a failure is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Config,
    Data,
    Init,
    Train,
    Prune,
    Resample,
    Evaluate,
    Diagnose,
    Export,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Data => "data",
            Stage::Init => "init",
            Stage::Train => "train",
            Stage::Prune => "prune",
            Stage::Resample => "resample",
            Stage::Evaluate => "evaluate",
            Stage::Diagnose => "diagnose",
            Stage::Export => "export",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
#[error("{stage} stage failed: {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

/// Tags errors with the stage they happened in.
pub trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, StageError>;
}

impl<T, E: Into<Error>> AtStage<T> for std::result::Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, StageError> {
        self.map_err(|e| StageError {
            stage,
            source: e.into(),
        })
    }
}
