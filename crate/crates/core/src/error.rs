use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    MalformedCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("column `{0}` named in the config is missing from the data file")]
    MissingColumn(String),

    #[error("no usable data rows")]
    EmptyData,

    #[error("row {row}, input `{column}` = {value} lies outside [{lower}, {upper}]")]
    OutOfRange {
        row: usize,
        column: String,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("under-determined fit: {n} rows for {p} basis terms (need n > p)")]
    UnderDetermined { n: usize, p: usize },

    #[error(
        "rank-deficient design matrix (singular value ratio {ratio:.3e}); offending terms: {}",
        terms.join(", ")
    )]
    RankDeficient { terms: Vec<String>, ratio: f64 },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("degenerate posterior for output `{0}`: sigma^2 is zero, band is undefined")]
    DegeneratePosterior(String),

    #[error("malformed model file: {0}")]
    ModelFormat(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for I/O and configuration problems, 2 for
    /// numerical or model failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnderDetermined { .. }
            | Error::RankDeficient { .. }
            | Error::Factorization(_)
            | Error::DegeneratePosterior(_)
            | Error::DimensionMismatch { .. } => 2,
            _ => 1,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
