use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised while loading or validating dataset files.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("manifest names unknown column `{column}`")]
    UnknownColumn { column: String },
    #[error("duplicate column `{column}`")]
    DuplicateColumn { column: String },
    #[error("row {row}, column `{column}`: non-numeric token `{token}`")]
    NonNumeric {
        row: usize,
        column: String,
        token: String,
    },
    #[error("row {row}, column `{column}`: missing value")]
    MissingValue { row: usize, column: String },
    #[error("row {row}, column `{column}`: effort must be finite and > 0, got {value}")]
    NonPositiveEffort {
        row: usize,
        column: String,
        value: f64,
    },
    #[error("row {row}: expected {expected} fields, found {found}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("no projects")]
    NoProjects,
    #[error("dataset is already normalized")]
    AlreadyNormalized,
    #[error("dataset `{0}` not found (looked for {1})")]
    NotFound(String, PathBuf),
}

/// Errors raised by the estimation, optimization and evaluation code.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("feature kind mismatch at feature {index}")]
    KindMismatch { index: usize },
    #[error("project has {found} features, expected {expected}")]
    SchemaMismatch { expected: usize, found: usize },
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),
    #[error("k = {k} exceeds case base of {size} projects")]
    TooFewCases { k: usize, size: usize },
    #[error("k must be >= 1")]
    ZeroK,
    #[error("empty case base")]
    EmptyCaseBase,
    #[error("no neighbours to aggregate")]
    EmptyNeighbors,
    #[error("query project is present in its own case base")]
    SelfMatch,
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("actual value at {index} must be > 0, got {value}")]
    NonPositiveActual { index: usize, value: f64 },
    #[error("dimension mismatch ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("need at least 3 projects to split, got {0}")]
    TooFewProjects(usize),
    #[error("basic and train sets overlap")]
    OverlappingSets,
}

/// Errors in user supplied configuration.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 1 config, 2 data, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Data(_) => 2,
            Error::Model(_) | Error::Io { .. } | Error::Json(_) => 3,
        }
    }
}
