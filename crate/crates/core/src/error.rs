use std::path::Path;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch in {context}: {left:?} vs {right:?}")]
    Shape {
        context: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("{source_name}:{line}: {message}")]
    Format {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("missing vector for id `{0}`")]
    MissingId(String),

    #[error("none of the sequence's n-grams are present in the table")]
    EmptyComposition,

    #[error("sense `{0}` is not in the inventory")]
    UnknownSense(String),

    #[error("document id `{0}` does not match `wsj_SSNN`")]
    IdFormat(String),

    #[error("training diverged at epoch {epoch}: mean loss {loss}")]
    Divergence { epoch: usize, loss: f64 },

    #[error("sense inventory mismatch: checkpoint has {checkpoint:?}, corpus has {corpus:?}")]
    InventoryMismatch {
        checkpoint: Vec<String>,
        corpus: Vec<String>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn shape(context: &'static str, left: &[usize], right: &[usize]) -> Self {
        Error::Shape {
            context,
            left: left.to_vec(),
            right: right.to_vec(),
        }
    }

    pub(crate) fn format(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn display_name(path: &Path) -> String {
    path.display().to_string()
}
