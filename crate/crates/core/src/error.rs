use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    MalformedRow { line: usize, message: String },

    #[error("line {line}: duplicate date {date}")]
    DuplicateDate { line: usize, date: String },

    #[error("line {line}: close must be positive, got {close}")]
    NonPositivePrice { line: usize, close: f64 },

    #[error("price series needs at least 2 rows, got {0}")]
    TooFewRows(usize),

    #[error("insufficient history: need index >= {needed}, got {index}")]
    InsufficientHistory { needed: usize, index: usize },

    #[error("degenerate window: sample variance is zero")]
    DegenerateWindow,

    #[error("degenerate series: {0}")]
    Degenerate(String),

    #[error("invalid {field}: {message}")]
    InvalidParameter { field: &'static str, message: String },

    #[error("misaligned inputs: {0}")]
    Misaligned(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the filesystem rather than by the data.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}
