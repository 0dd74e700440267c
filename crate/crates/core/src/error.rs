use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("normal equations are singular")]
    SingularSystem,
    #[error("too few points: need {needed}, have {have}")]
    TooFewPoints { needed: usize, have: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("external predictor failure: {0}")]
    ExternalPredictorFailure(String),
}

impl Error {
    /// Stable machine-readable code used by the HTTP and CLI layers.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::SingularSystem => "SingularSystem",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::EmptyDataset => "EmptyDataset",
            Error::ExternalPredictorFailure(_) => "ExternalPredictorFailure",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
