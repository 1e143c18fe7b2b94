use thiserror::Error;

/// Errors produced by the cropping, scoring and evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to decode image: {0}")]
    Decode(#[from] image::ImageError),

    #[error("unsupported channel count {0}, expected 1 or 3")]
    UnsupportedChannels(u8),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("image is {width}x{height}, autocorrelation needs at least 2x2")]
    DegenerateGeometry { width: u32, height: u32 },

    #[error("rect ({x},{y}) {w}x{h} exceeds image bounds {width}x{height}")]
    OutOfBounds {
        x: u32,
        y: u32,
        w: u32,
        h: u32,
        width: u32,
        height: u32,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("scorer failure: {0}")]
    ScorerFailure(String),

    #[error("missing score for {id}")]
    MissingScore { id: String },

    #[error("duplicate score for {id}")]
    DuplicateScore { id: String },

    #[error("score {score} for {id} is outside [0,1]")]
    RangeViolation { id: String, score: f64 },

    #[error("single class in {context}: need both real and synthetic items")]
    SingleClass { context: String },

    #[error("no positive items")]
    NoPositives,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}:{line}: {reason}")]
    ManifestParse {
        path: String,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
