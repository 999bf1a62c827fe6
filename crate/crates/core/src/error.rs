use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter outside its supported range (height bound, probability, schedule).
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input data, such as a non-primitive ray or a ray outside `R_h`.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("could not parse {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    /// A mathematical invariant failed to hold. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
