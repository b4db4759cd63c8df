use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bbox: {0}")]
    InvalidBBox(String),
    #[error("invalid mask: {0}")]
    InvalidMask(String),
    #[error("malformed RLE: {0}")]
    MalformedRle(String),
    #[error("detection has no mask")]
    MissingMask,

    #[error("infeasible constraint: {0}")]
    InfeasibleConstraint(String),
    #[error("layout overflow: {0}")]
    LayoutOverflow(String),
    #[error("invalid timeline spec: {0}")]
    InvalidSpec(String),

    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },

    #[error("need at least 2 event marks to infer orientation, found {0}")]
    TooFewMarks(usize),
    #[error("no elements to cluster")]
    NoElements,

    #[error("foreground is empty after erosion")]
    EmptyForeground,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid trimap: {0}")]
    InvalidTrimap(String),

    #[error("region is not text-like: {0}")]
    NotTextLike(String),
    #[error("no event clusters found")]
    NoEvents,

    #[error("value {value} outside scale domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },
    #[error("template incomplete: {0}")]
    TemplateIncomplete(String),
    #[error("source has {slots} event slots but {events} events requested and looping is disabled")]
    InsufficientSlots { slots: usize, events: usize },
    #[error("invalid render job: {0}")]
    InvalidJob(String),

    #[error("no ground truth elements")]
    NoGroundTruth,
    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("image: {0}")]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { location: location.into(), message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
