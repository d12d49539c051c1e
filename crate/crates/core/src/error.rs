use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("shape mismatch: expected {expected} features, got {found}")]
    FeatureMismatch { expected: usize, found: usize },

    #[error("screening requires two classes")]
    SingleClassScreening,

    #[error("training requires both classes to be present")]
    SingleClassTraining,

    #[error("non-finite feature value at sample {sample}, feature {feature}")]
    NonFinite { sample: usize, feature: usize },

    #[error("block-wise CV requires ≥ 2 blocks")]
    TooFewBlocks,

    #[error("invalid split parameters: {0}")]
    InvalidSplit(String),

    #[error("invalid decoder spec: {0}")]
    InvalidSpec(String),

    #[error("invalid simulation config: {0}")]
    InvalidSimulation(String),

    #[error("no discriminative direction")]
    NoDiscriminativeDirection,

    #[error("invalid tuning strategy: {0}")]
    InvalidStrategy(String),

    #[error("no valid inner split: every inner training set was single-class")]
    NoValidSplits,

    #[error("{0}")]
    Evaluation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the user's configuration or input files, as opposed
    /// to failures while running.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::File { .. } | Error::InvalidSimulation(_) | Error::MissingColumn(_)
        )
    }
}
