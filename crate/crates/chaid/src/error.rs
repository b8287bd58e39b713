use thiserror::Error;

/// Crate-wide error type. Variants are grouped by the subsystem that raised
/// them so CLI diagnostics can name the origin.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema: {0}")]
    Schema(String),
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("stats: {0}")]
    Stats(String),
    #[error("tree: {0}")]
    Tree(String),
    #[error("rules: {0}")]
    Rules(String),
    #[error("eval: {0}")]
    Eval(String),
    #[error("baseline: {0}")]
    Baseline(String),
    #[error("synth: {0}")]
    Synth(String),
    #[error("model: {0}")]
    Model(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
