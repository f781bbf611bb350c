use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: malformed csv: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: malformed json report: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("target column `{0}` not found in header")]
    MissingTarget(String),

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}: class label {value} is not an integer")]
    NonIntegerLabel { row: usize, value: f64 },

    #[error("dataset needs at least {needed} rows, found {found}")]
    TooFewRows { needed: usize, found: usize },

    #[error("dataset needs at least {needed} features, found {found}")]
    TooFewFeatures { needed: usize, found: usize },

    #[error("feature subset is empty")]
    EmptySubset,

    #[error("feature index {index} out of range for {count} features")]
    FeatureOutOfRange { index: usize, count: usize },

    #[error("training set is empty")]
    EmptyTraining,

    #[error("degenerate target: {0}")]
    DegenerateTarget(String),

    #[error("score undefined: {0}")]
    UndefinedScore(String),

    #[error("denominator score {0} is not positive")]
    NonPositiveDenominator(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("seed {seed}: {source}")]
    Seed {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("subset {subset}: {source}")]
    Subset {
        subset: String,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed report {}: {message}", path.display())]
    Report { path: PathBuf, message: String },
}

impl Error {
    /// True for failures of the filesystem layer rather than the data.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Csv { source, .. } => source.is_io_error(),
            Error::Seed { source, .. } | Error::Subset { source, .. } => source.is_io(),
            _ => false,
        }
    }
}
