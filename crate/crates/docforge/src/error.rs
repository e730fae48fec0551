use std::path::PathBuf;

/// Errors surfaced by the extraction pipeline.
///
/// The CLI maps these onto process exit codes: anything that boils down to
/// bad input or unusable configuration exits 1, while [`Error::NoApiUrls`]
/// gets its own exit code (2) because "the classifier found nothing" is a
/// meaningfully different outcome from "you pointed me at a file that does
/// not exist".
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The crawl seed was invalid or could not be fetched.
    #[error("crawl failed: {0}")]
    Crawl(String),

    /// A corpus directory was missing, unreadable, or contained no HTML.
    #[error("corpus error at {path}: {reason}")]
    Corpus { path: PathBuf, reason: String },

    /// The label file was malformed.
    #[error("label file error: {0}")]
    Labels(String),

    /// Training requires at least one positive and one negative example.
    #[error("training set contains a single class; need both positive and negative examples")]
    SingleClass,

    /// A caller violated an argument precondition (bad fold count, ...).
    #[error("{0}")]
    InvalidInput(String),

    /// A model file could not be read or did not have the expected shape.
    #[error("model error: {0}")]
    Model(String),

    /// No candidate URL was classified as an API call, so there is nothing
    /// to infer a base URL from.
    #[error("no API URLs classified")]
    NoApiUrls,

    /// A specification document failed JSON parsing. Line and column point
    /// at the offending byte in the input text.
    #[error("spec parse error at line {line}, column {column}: {message}")]
    SpecParse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A specification document parsed as JSON but is missing required
    /// structure (e.g. no `host`).
    #[error("invalid spec: {0}")]
    SpecInvalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
