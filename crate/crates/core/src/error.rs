use thiserror::Error;

/// Errors raised by the exact algebra and certification routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ambient dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polynomial is not homogeneous (degrees {0:?} present)")]
    NotHomogeneous(Vec<u32>),

    #[error("axis index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("index tuple {0:?} is not strictly increasing")]
    UnsortedIndex(Vec<usize>),

    #[error("form rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
