use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
///
/// The type is `Clone` because evaluation outcomes, failures included, are
/// shared between every worker waiting on the same grid point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("label column {0} not found")]
    MissingLabelColumn(String),

    #[error("dataset has fewer than 2 classes")]
    TooFewClasses,

    #[error("class {class:?} has {count} object(s), at least 2 are required")]
    ClassTooSmall { class: String, count: usize },

    #[error("dataset is malformed: {0}")]
    InvalidDataset(String),

    #[error("fold count must be at least 2, got {0}")]
    InvalidFoldCount(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("grid spacing {0} is invalid: 1/delta must be a positive integer")]
    InvalidDelta(f64),

    #[error("empty training set")]
    EmptyTrainSet,

    #[error("degenerate fold {fold}: {message}")]
    DegenerateFold { fold: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },

    #[error("serialization failed: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Serialization(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
