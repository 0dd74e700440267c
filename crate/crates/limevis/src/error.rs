use std::io;

use thiserror::Error;

pub type Result<T, E = LimevisError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LimevisError {
    #[error(transparent)]
    Core(#[from] limevis_core::Error),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("truncated data: {0}")]
    TruncatedData(String),
    #[error("index {index} out of range for {count} records")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("malformed file: {0}")]
    MalformedFile(String),
    #[error("{images} images but {labels} labels")]
    LabelImageCountMismatch { images: usize, labels: usize },
    #[error("unknown category: {0}")]
    UnknownCategory(String),
    #[error("category {0} has no images")]
    EmptyCategory(String),
    #[error("unknown image id {0}")]
    UnknownImage(usize),
    #[error("superpixel {superpixel} out of range for {count} superpixels")]
    SuperpixelOutOfRange { superpixel: usize, count: usize },
    #[error("pixel ({x}, {y}) outside a {width}x{height} image")]
    OutOfBounds { x: usize, y: usize, width: usize, height: usize },
    #[error("no session has been executed")]
    NoSession,
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

impl LimevisError {
    pub fn code(&self) -> &'static str {
        match self {
            LimevisError::Core(e) => e.code(),
            LimevisError::UnsupportedFormat(_) => "UnsupportedFormat",
            LimevisError::TruncatedData(_) => "TruncatedData",
            LimevisError::IndexOutOfRange { .. } => "IndexOutOfRange",
            LimevisError::MalformedFile(_) => "MalformedFile",
            LimevisError::LabelImageCountMismatch { .. } => "LabelImageCountMismatch",
            LimevisError::UnknownCategory(_) => "UnknownCategory",
            LimevisError::EmptyCategory(_) => "EmptyCategory",
            LimevisError::UnknownImage(_) => "UnknownImage",
            LimevisError::SuperpixelOutOfRange { .. } => "SuperpixelOutOfRange",
            LimevisError::OutOfBounds { .. } => "OutOfBounds",
            LimevisError::NoSession => "NoSession",
            LimevisError::BadRequest(_) => "BadRequest",
            LimevisError::Io(_) => "Io",
        }
    }

    pub fn is_predictor_failure(&self) -> bool {
        matches!(self, LimevisError::Core(limevis_core::Error::ExternalPredictorFailure(_)))
    }

    /// Process exit status: 2 bad arguments, 3 data error, 4 predictor failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            e if e.is_predictor_failure() => 4,
            LimevisError::Core(limevis_core::Error::InvalidParams(_))
            | LimevisError::UnknownCategory(_)
            | LimevisError::BadRequest(_) => 2,
            _ => 3,
        }
    }
}

pub(crate) fn predictor_failure(msg: impl Into<String>) -> LimevisError {
    LimevisError::Core(limevis_core::Error::ExternalPredictorFailure(msg.into()))
}
