use thiserror::Error;

/// Errors produced anywhere in the codec.
///
/// Callers that only care about the broad category can use
/// [`Error::is_data_error`], which separates bad caller input from bad
/// (malformed or corrupted) encoded data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("corrupt stream in band {band} at symbol {index}: {message}")]
    Corrupt {
        band: usize,
        index: usize,
        message: String,
    },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("band {band} requested out of coding order: {message}")]
    Sequencing { band: usize, message: String },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn format(offset: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: msg.into(),
        }
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistent(msg.into())
    }

    /// True for errors caused by malformed or corrupted encoded input, as
    /// opposed to invalid arguments from the caller.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_) | Error::Sequencing { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
