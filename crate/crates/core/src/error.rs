use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file or record.
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    /// A span or token sequence does not line up with its instance.
    #[error("alignment error in instance {instance}: {message}")]
    Alignment { instance: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no trainable positions")]
    NoTrainablePositions,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("refusing to overwrite {0} (pass --force)")]
    OutputExists(PathBuf),

    #[error("model file: {0}")]
    Model(String),
}

impl Error {
    pub fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    pub fn alignment(instance: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Alignment {
            instance: instance.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Prefixes alignment errors with an instance id when they were raised
    /// without one.
    pub fn in_instance(self, id: &str) -> Self {
        match self {
            Error::Alignment { instance, message } if instance.is_empty() => Error::Alignment {
                instance: id.to_string(),
                message,
            },
            Error::InvalidArgument(m) => Error::Alignment {
                instance: id.to_string(),
                message: m,
            },
            other => other,
        }
    }

    /// True for errors caused by the data rather than by how the tool was invoked.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_) | Error::OutputExists(_))
    }
}
