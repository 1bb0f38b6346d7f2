use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the indexing, training and evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corpus root does not exist: {0}")]
    MissingRoot(PathBuf),

    #[error("empty corpus: no usable source files under {0}")]
    EmptyCorpus(PathBuf),

    #[error("manifest entry missing on disk: {0}")]
    ManifestEntryMissing(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("evaluation requires labeled queries (query `{0}` has no label)")]
    UnlabeledQuery(String),

    #[error("invalid language profile: {0}")]
    Profile(String),

    #[error("invalid frequency bounds: lower = {lower}, upper = {upper}")]
    InvalidBounds { lower: usize, upper: usize },

    #[error(
        "every code feature was removed by the frequency bounds [{lower}, {upper}]; \
         widen the bounds"
    )]
    AllFeaturesFiltered { lower: usize, upper: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid hyperparameters: {0}")]
    Hyperparams(String),

    #[error("loss became non-finite at iteration {iteration}; retry with a smaller learning rate than eta = {eta}")]
    Diverged { iteration: usize, eta: f64 },

    #[error("unknown feature `{key}`; closest keys: {}", suggestions.join(", "))]
    UnknownFeature { key: String, suggestions: Vec<String> },

    #[error("relevant set is empty; recall is undefined")]
    EmptyRelevantSet,

    #[error("cross-validation needs at least {needed} labeled queries, got {got}")]
    TooFewQueries { needed: usize, got: usize },

    #[error("corpus fingerprint mismatch: artifacts were built from {expected}, current corpus is {found}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(what: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            what,
            message: message.into(),
        }
    }
}
