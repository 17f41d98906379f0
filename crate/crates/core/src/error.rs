use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("matrix is singular: |det| = {det:e} below threshold {threshold:e}")]
    SingularMatrix { det: f64, threshold: f64 },

    #[error("probe Gram matrix is rank deficient (|det| = {det:e})")]
    RankDeficient { det: f64 },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("detector `{label}` has zero recorded power scale")]
    InconsistentScale { label: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("malformed field map: {0}")]
    MalformedMap(String),

    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` is neither `Clone` nor `PartialEq`; keep the kind and message.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{kind:?}: {message}")]
pub struct IoError {
    pub kind: std::io::ErrorKind,
    pub message: String,
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError { kind: e.kind(), message: e.to_string() })
    }
}
