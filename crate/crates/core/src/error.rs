use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: missing DIMENSION")]
    MissingDimension { line: usize },

    #[error("line {line}: node count mismatch (DIMENSION {expected}, found {found})")]
    NodeCountMismatch { line: usize, expected: usize, found: usize },

    #[error("line {line}: unknown EDGE_WEIGHT_TYPE `{value}`")]
    UnknownEdgeWeightType { line: usize, value: String },

    #[error("line {line}: malformed number `{token}`")]
    MalformedNumber { line: usize, token: String },

    #[error("metric {metric} needs {needs}, which the instance does not provide")]
    MetricUnavailable { metric: &'static str, needs: &'static str },

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("invalid crossover cut ({a}, {b}) for tours of length {n}")]
    InvalidCut { a: usize, b: usize, n: usize },

    #[error("instance has {n} cities; need at least 3")]
    TooFewCities { n: usize },

    #[error("instance has {n} cities, above the exact solver limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("city {city} does not fit in {bits} bits")]
    CityOutOfRange { city: usize, bits: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("run {run_index} (seed {seed}): {source}")]
    Run {
        run_index: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
