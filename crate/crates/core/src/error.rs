use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dictionary line {line}: {message}")]
    Dictionary { line: usize, message: String },

    #[error("line {index}: {message}")]
    Record { index: usize, message: String },

    #[error("field `{field}`: unknown code `{raw}`")]
    UnknownCode { field: String, raw: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("mapping error: no metastasis mapping for era {era}, code `{code}`")]
    Mapping { era: i64, code: String },

    #[error("degenerate dataset: {0}")]
    Degenerate(String),

    #[error("insufficient data: requested {requested} rows but only {available} available")]
    InsufficientData { requested: usize, available: usize },

    #[error("no eligible strata: every class falls below the minority ratio {ratio}")]
    NoEligibleStrata { ratio: f64 },

    #[error(
        "capacity error: cannot draw a balanced sample of {requested} rows without replacement; \
         max achievable sample size is {max_achievable}"
    )]
    Capacity { requested: usize, max_achievable: usize },

    #[error("training error: {0}")]
    Training(String),

    #[error("prediction error: {0}")]
    Prediction(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("spec error: {0}")]
    Spec(String),

    #[error("incompatible schemas: {0}")]
    IncompatibleSchema(String),

    #[error("emission error: {0}")]
    Emission(String),

    #[error("{context}: {source}")]
    Cell {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
