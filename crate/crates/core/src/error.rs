use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sentence")]
    EmptySentence,

    #[error("malformed token {token:?}")]
    MalformedToken { token: String },

    #[error("label arity mismatch: expected {expected} gap labels, got {got}")]
    LabelArity { expected: usize, got: usize },

    #[error("not enough data: {0}")]
    NotEnoughData(String),

    #[error("corpus mixes labeled and unlabeled sentences")]
    MixedCorpus,

    #[error("operation requires a labeled corpus")]
    NeedsLabels,

    #[error("cannot read resource {path}: {source}")]
    ResourceIo {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed entry on line {line}: {entry:?}")]
    MalformedEntry { line: usize, entry: String },

    #[error("training set contains a single class")]
    DegenerateLabels,

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("unsupported model format: {0}")]
    ModelVersion(String),

    #[error("model parse error on line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("gold and predicted sentence {sentence} have different syllables")]
    Alignment { sentence: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn resource(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::ResourceIo {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn model_format(line: usize, message: impl Into<String>) -> Self {
        Error::ModelFormat {
            line,
            message: message.into(),
        }
    }
}
