use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-positive or non-finite pixel spacing: {0}")]
    NonPositiveSpacing(f64),

    #[error("image dimensions must be positive, got {width}x{height}")]
    EmptyDimensions { width: u32, height: u32 },

    #[error("landmark {index} at ({x}, {y}) is outside the frame")]
    OutOfFrame { index: usize, x: f64, y: f64 },

    #[error("heatmap value at index {index} is negative or not finite: {value}")]
    InvalidHeatmapValue { index: usize, value: f64 },

    #[error("heatmap has no positive value")]
    ZeroHeatmap,

    #[error("heatmap shapes differ: {left:?} vs {right:?}")]
    ShapeMismatch { left: (u32, u32), right: (u32, u32) },

    #[error("affine transform is singular (determinant {0})")]
    SingularTransform(f64),

    #[error("every landmark left the frame under the transform")]
    AllLandmarksOutOfFrame,

    #[error("no in-frame augmentation found after {0} attempts")]
    AugmentationExhausted(usize),

    #[error("channel count mismatch: {heatmaps} heatmap channels vs {coords} coordinates")]
    ChannelMismatch { heatmaps: usize, coords: usize },

    #[error("channel {channel}: {source}")]
    Channel {
        channel: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("evaluation set is empty")]
    EmptyEvaluation,

    #[error("evaluation shape mismatch: {0}")]
    EvalShape(String),

    #[error("infeasible phantom configuration: {0}")]
    InfeasiblePhantom(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Broad category used to pick a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Internal,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::Internal(_) => ErrorKind::Internal,
            Error::Channel { source, .. } => source.kind(),
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
