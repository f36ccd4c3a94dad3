use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulation chain.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes, grids or member sets that do not line up.
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid parameterization of a component.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("index {index} out of bounds for length {len}")]
    Bounds { index: usize, len: usize },

    #[error("degenerate pupil: {0}")]
    DegeneratePupil(String),

    /// Malformed input file; `offset` is the byte position of the problem.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Error raised inside a named pipeline stage.
    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    /// Wrap this error with the name of the pipeline stage it came from.
    pub fn in_stage(self, stage: &str) -> Self {
        Error::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
