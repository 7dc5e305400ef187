use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    Dimension {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("invalid label code {0}; labels must be -1, 0 or +1")]
    InvalidLabel(i64),

    #[error("score {value} at ({row}, {col}) is outside the open interval (0, 1)")]
    ScoreOutOfRange { row: usize, col: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty score distribution")]
    EmptyDistribution,

    #[error("insufficient known samples for category {category}: {positives} positive, {negatives} negative (need {required} each)")]
    InsufficientData {
        category: usize,
        positives: usize,
        negatives: usize,
        required: usize,
    },

    #[error("could not generate a non-degenerate dataset after {attempts} attempts")]
    DegenerateDataset { attempts: u32 },

    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("paired differences have zero variance (mean {mean})")]
    ZeroVariance { mean: f64 },

    #[error("need at least 2 paired differences, got {0}")]
    TooFewPairs(usize),

    #[error("checkpoint {0}")]
    Checkpoint(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
