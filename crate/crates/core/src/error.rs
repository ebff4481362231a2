use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument falls outside the domain an operation is defined on.
    #[error("{what}: value {value} out of range ({limit})")]
    Range {
        what: &'static str,
        value: String,
        limit: String,
    },

    #[error("{0}")]
    Domain(String),

    #[error("{a} has no inverse modulo {q}")]
    NoInverse { a: i64, q: u64 },

    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("computation budget exceeded: {0}")]
    Budget(String),

    #[error("numerical routine did not converge: {0}")]
    Numeric(String),

    #[error("no baseline entry for check `{0}`")]
    MissingBaseline(String),

    #[error("baseline for `{id}` was frozen on grid {frozen}, current grid is {current}")]
    BaselineGrid {
        id: String,
        frozen: String,
        current: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn range(what: &'static str, value: impl ToString, limit: impl ToString) -> Self {
        Error::Range {
            what,
            value: value.to_string(),
            limit: limit.to_string(),
        }
    }
}
