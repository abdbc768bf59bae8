use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("transform is singular")]
    SingularTransform,

    #[error("region does not overlap the image")]
    EmptyRegion,

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("point maps to infinity")]
    PointAtInfinity,

    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("degenerate quadrilateral: denominator triangle has zero area")]
    DegenerateQuad,

    #[error("insufficient feature points: need at least {needed}, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("descriptor database is empty")]
    EmptyDatabase,

    #[error("no matching document: best score {best} is below the minimum of {min_votes} votes")]
    NoMatch { best: u32, min_votes: u32 },

    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },

    #[error("consistency error at {pointer}: {message}")]
    Consistency { pointer: String, message: String },

    #[error("accuracy is undefined for an empty ground-truth string")]
    UndefinedAccuracy,

    #[error("specification error: {0}")]
    Spec(String),

    #[error("malformed store file: {0}")]
    StoreFormat(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    /// Attach the path of the file being processed.
    pub fn at(self, path: impl Into<PathBuf>) -> Error {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
