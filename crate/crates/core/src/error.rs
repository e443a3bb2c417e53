use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate landmark configuration: {0}")]
    DegenerateConfiguration(&'static str),
    #[error("transform is not invertible (scale {0})")]
    NonInvertible(f64),
    #[error("convex hull has fewer than 3 non-collinear vertices")]
    DegeneratePolygon,
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch { expected: (usize, usize), actual: (usize, usize) },
    #[error("face bounding box is empty")]
    EmptyBox,
    #[error("insufficient input: need {needed}, have {available}")]
    InsufficientInput { needed: usize, available: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("only one class present at the {0} level")]
    SingleClass(&'static str),
    #[error("video has no frames")]
    EmptyVideo,
    #[error("invalid landmarks: {0}")]
    InvalidLandmarks(String),
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("inconsistent labels within video {0}")]
    InconsistentVideoLabel(String),
    #[error("score {0} is not a finite value in [0, 1]")]
    InvalidScore(f64),
}
