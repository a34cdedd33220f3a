use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("inconsistent duplicate integral {indices:?}: {first} vs {second}")]
    Consistency {
        indices: [usize; 4],
        first: f64,
        second: f64,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("symmetry violation: {0}")]
    Symmetry(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("degenerate branching space: {0}")]
    Collinear(String),

    #[error("non-finite energy at displacement {0}")]
    NonFinite(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Short machine-readable tag used by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Consistency { .. } => "consistency",
            Error::Argument(_) => "argument",
            Error::Symmetry(_) => "symmetry",
            Error::Contract(_) => "contract",
            Error::UnknownStrategy { .. } => "unknown-strategy",
            Error::Collinear(_) => "collinear",
            Error::NonFinite(_) => "non-finite",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
