use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed {grammar} identifier: {input:?}")]
    MalformedIdentifier {
        grammar: &'static str,
        input: String,
    },

    #[error("serial registry unavailable at {path}: {source}")]
    RegistryUnavailable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("document {0:?} has no native identifier to register")]
    MissingNativeId(String),

    #[error("unknown {what}: {value:?}")]
    UnknownValue { what: &'static str, value: String },

    #[error("{path}:{line}: {message}")]
    Fixture {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown dossier: {0}")]
    UnknownDossier(String),

    #[error("unknown document: {0}")]
    UnknownDocument(String),

    #[error("empty query")]
    EmptyQuery,

    #[error("malformed expression: {0}")]
    MalformedExpression(String),

    #[error("hit does not belong to document {0}")]
    NotAHit(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corrupt record {path}: {source}")]
    Corrupt {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn malformed(grammar: &'static str, input: &str) -> Self {
        Error::MalformedIdentifier {
            grammar,
            input: input.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
