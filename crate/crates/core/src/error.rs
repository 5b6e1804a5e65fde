use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("unknown timezone `{0}`")]
    UnknownTimezone(String),

    #[error("cannot split {nodes} nodes into {groups} groups")]
    TooFewNodes { nodes: usize, groups: usize },

    #[error("margin sums differ: rows sum to {rows}, columns to {cols}")]
    MarginMismatch { rows: u64, cols: u64 },

    #[error("enumeration budget exceeded: total {total} > {budget}")]
    BudgetExceeded { total: u64, budget: u64 },

    #[error("no seed accounts found in the partition; run without labels instead")]
    NoSeeds,

    #[error("unknown article `{0}`")]
    UnknownArticle(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}
