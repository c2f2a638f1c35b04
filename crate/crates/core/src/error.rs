use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("constant column `{0}`: zero spread around the median")]
    ConstantColumn(String),
    #[error("constant composition group `{0}`: pooled spread is zero")]
    ConstantGroup(String),
    #[error("no commonly observed variable for pair ({0}, {1})")]
    IncomparablePair(usize, usize),
    #[error("dissimilarity group {0} has zero standard deviation")]
    DegenerateGroup(usize),
    #[error("shift constant fit failed: every candidate had a degenerate regression")]
    FitFailure,
    #[error("index `{0}` undefined: {1}")]
    UndefinedIndex(&'static str, String),
    #[error("calibration of `{index}` degenerate (stratum {stratum}): zero pooled sd")]
    DegenerateCalibration { index: String, stratum: String },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn schema(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Schema { path: path.into(), message: message.into() }
    }

    /// Process exit code: 2 for data problems, 3 for numeric ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConstantColumn(_)
            | Error::ConstantGroup(_)
            | Error::DegenerateGroup(_)
            | Error::FitFailure
            | Error::UndefinedIndex(..)
            | Error::DegenerateCalibration { .. }
            | Error::Numeric(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
