use thiserror::Error;

/// Errors produced by the modem, channel and simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Fewer chips than one spreading code length were available.
    #[error("partial symbol: need {needed} chips after the start index, have {available}")]
    PartialSymbol { needed: usize, available: usize },

    #[error("payload must be {expected} bits, got {found}")]
    PayloadLength { expected: usize, found: usize },

    #[error("checksum mismatch: computed {computed:#04x}, received {received:#04x}")]
    ChecksumMismatch { computed: u8, received: u8 },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
