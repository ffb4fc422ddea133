use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hop mismatch: track hop {track} s, annotation hop {annotation} s")]
    HopMismatch { track: f64, annotation: f64 },

    #[error("length mismatch: track has {track} frames, annotation has {annotation}")]
    LengthMismatch { track: usize, annotation: usize },

    #[error("spectrum was sampled on a different frequency grid than the kernel bank")]
    GridMismatch,

    #[error("training diverged at step {step}: {detail}")]
    Diverged { step: usize, detail: String },

    #[error("bad weights file: {0}")]
    Weights(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
