use thiserror::Error;

use crate::learners::tree::DecisionTree;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error in data row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("label `{label}` in data row {row} is not in the label vocabulary")]
    UnknownLabel { label: String, row: usize },

    #[error("label {value} out of range for {classes} classes")]
    LabelRange { value: usize, classes: usize },

    #[error("preprocessing failed for column `{column}`: {message}")]
    Preprocess { column: String, message: String },

    #[error("split error: {0}")]
    Split(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("ensemble error: {0}")]
    Ensemble(String),

    /// The first boosting stump was no better than chance; the stump is kept
    /// so callers can inspect it.
    #[error("degenerate boosting: first stump has weighted error {error:.6}")]
    DegenerateBoost { error: f64, stump: Box<DecisionTree> },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{label} failed after {seconds:.6}s: {source}")]
    Phase {
        label: String,
        seconds: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("model format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("binary encoding error: {0}")]
    Bincode(#[from] bincode::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
