use thiserror::Error;

use crate::spectral::SpectralField;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{samples} samples cannot represent wavenumbers up to {k_max} (need at least {})", 2 * k_max + 1)]
    Aliasing { samples: usize, k_max: usize },

    #[error("resolution mismatch: K = {0} vs K = {1}")]
    ResolutionMismatch(usize, usize),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("non-finite values produced by {0}")]
    NonFinite(&'static str),

    #[error("numerical blow-up at t = {time}")]
    BlowUp {
        time: f64,
        state: Box<SpectralField>,
    },

    #[error("inadmissible parameters for {lemma}: {constraint}")]
    Inadmissible { lemma: String, constraint: String },

    #[error("operator expression references undefined function `{0}`")]
    UndefinedFunction(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
