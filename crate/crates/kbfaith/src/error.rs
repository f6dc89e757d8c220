//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line that does not conform to the file format (wrong field count,
    /// empty required field, bad enum value, label containing the separator).
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown category {0:?} (expected one of: location, person, organization, event, art, consumer_good, other)")]
    UnknownCategory(String),

    #[error("unknown entity id {0:?}")]
    UnknownEntity(String),

    /// A JSON-lines record that fails to parse or violates a corpus-level
    /// invariant (for example a duplicate document id).
    #[error("{path}:{line}: {message}")]
    Json {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("no fill provided for mask slot {0}")]
    MissingFill(usize),

    #[error("vocabulary file {0} is empty")]
    EmptyVocabulary(PathBuf),

    #[error("no facts to sample from after applying the category filter")]
    EmptySamplePool,

    #[error("skeleton text is missing placeholder for slot {0}")]
    MissingPlaceholder(usize),

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
