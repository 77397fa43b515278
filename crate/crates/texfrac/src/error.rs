use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt header: {0}")]
    CorruptHeader(String),

    #[error("image {width}x{height} too small, need at least {min_width}x{min_height}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min_width: usize,
        min_height: usize,
    },

    #[error("threshold level {level} out of range 0..={max}")]
    LevelOutOfRange { level: u32, max: u32 },

    #[error("image has no white pixels")]
    EmptyImage,

    #[error("box size {delta} outside valid range 2..={max}")]
    BadDelta { delta: usize, max: usize },

    #[error("no gliding box contains a white point")]
    ZeroMass,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("spectrum sum overflowed or vanished at q = {q}")]
    NumericalOverflow { q: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("singular covariance: {0}")]
    SingularCovariance(String),

    #[error("label space mismatch: {0}")]
    UnknownLabelSpace(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{failed} of {total} files failed:\n{details}")]
    BatchFailed {
        failed: usize,
        total: usize,
        details: String,
    },
}

impl Error {
    /// Maps an i/o error on `path`, turning NotFound into the dedicated variant.
    pub fn from_io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
