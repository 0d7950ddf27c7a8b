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

    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("malformed SQL dump at byte {offset}: {message}")]
    Sql { offset: u64, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("store integrity check failed: expected fingerprint {expected}, found {found}")]
    Integrity { expected: String, found: String },

    #[error("category {name:?} not found; closest: {}", suggestions.join(", "))]
    CategoryNotFound {
        name: String,
        suggestions: Vec<String>,
    },

    #[error("no seed articles under root category {0:?}")]
    EmptySeed(String),

    #[error("vocabulary for {0:?} is empty after preprocessing")]
    EmptyVocabulary(String),

    #[error("category id {0} is not part of the store")]
    UnknownCategory(u64),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unrecognized system name {name:?}; expected <k>-WT<n|all> with k in 1..=100, or <q>-IR<10|100|all>")]
    SystemName { name: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
