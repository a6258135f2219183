use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised anywhere in the ranking pipeline.
///
/// Variants are grouped into classes that map onto distinct process exit
/// codes (see [`Error::exit_code`]).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {message}")]
    Format { context: String, message: String },

    #[error("row count mismatch: header declares {expected} rows, found {found}")]
    RowCountMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at row {row}")]
    NonFinite { row: usize },

    #[error("zero-norm row {row}")]
    ZeroNorm { row: usize },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("id {0:?} not found")]
    NotFound(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("degenerate result: {0}")]
    Degenerate(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            context: context.into(),
            message: message.into(),
        }
    }

    /// Process exit code for this error class.
    ///
    /// | code | class |
    /// |------|-------|
    /// | 1 | internal |
    /// | 3 | input (I/O, malformed or inconsistent files) |
    /// | 4 | invalid parameter |
    /// | 5 | not found |
    /// | 6 | degenerate result (e.g. nothing left after denoising) |
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Internal(_) => 1,
            Error::Io { .. }
            | Error::Format { .. }
            | Error::RowCountMismatch { .. }
            | Error::DimensionMismatch { .. }
            | Error::NonFinite { .. }
            | Error::ZeroNorm { .. }
            | Error::DuplicateId(_)
            | Error::UnknownLabel(_)
            | Error::Empty(_) => 3,
            Error::InvalidParam(_) => 4,
            Error::NotFound(_) => 5,
            Error::Degenerate(_) => 6,
        }
    }
}
