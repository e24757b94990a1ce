use std::path::PathBuf;

use thiserror::Error;

/// Errors shared across the monitoring pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    DepthFormat { path: PathBuf, reason: String },

    #[error("raster dimension mismatch: {expected} vs {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("image too small for edge detection ({width}x{height}, need at least 3x3)")]
    ImageTooSmall { width: usize, height: usize },

    #[error("invalid fuzzy system: {0}")]
    InvalidFis(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("series has zero variance; correlation is undefined")]
    ZeroVariance,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("box entirely behind the camera")]
    BehindCamera,

    #[error("{path}:{line}: {reason}")]
    Dataset {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("frame {frame_id}: {source}")]
    Frame {
        frame_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Attach a frame id to an error bubbling out of per-frame processing.
    pub fn in_frame(self, frame_id: &str) -> Error {
        Error::Frame {
            frame_id: frame_id.to_string(),
            source: Box::new(self),
        }
    }
}
