use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid UTF-8 at byte offset {offset}")]
    InvalidEncoding { offset: usize },

    #[error("overlapping chapter ranges: [{prev_start}, {prev_end}) and [{start}, {end})")]
    OverlappingChapters {
        prev_start: usize,
        prev_end: usize,
        start: usize,
        end: usize,
    },

    #[error("unknown document: {0}")]
    UnknownDocument(String),

    #[error("duplicate document id: {0}")]
    DuplicateDocument(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid date: {0}")]
    InvalidDate(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("session is bound to generation {session} but the corpus is {corpus}; session is read-only")]
    StaleGeneration { session: String, corpus: String },

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid pattern: {0}")]
    Regex(#[from] regex::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
