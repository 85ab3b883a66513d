use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, ClusterError>;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("center set is empty")]
    EmptyCenters,

    #[error("dimension mismatch: expected dim={expected}, got dim={got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be >= 1")]
    ZeroDimension,

    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },

    #[error("weight must be finite and > 0, got {weight} at point {index}")]
    InvalidWeight { index: usize, weight: f64 },

    #[error("invalid k={k}: {reason}")]
    InvalidK { k: usize, reason: &'static str },

    #[error("fuzziness m must lie in (0, 1), got {0}")]
    InvalidFuzziness(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("brute force instance too large: {k}^{n} assignments exceeds {limit}")]
    InstanceTooLarge { n: usize, k: usize, limit: u64 },

    #[error("no points have been ingested")]
    EmptyStream,

    #[error("{path}: row {row}, column {column}: cannot parse {cell:?} as a number")]
    Parse {
        path: PathBuf,
        row: usize,
        column: usize,
        cell: String,
    },

    #[error("{path}: row {row} has {got} columns, expected {expected}")]
    RaggedRow {
        path: PathBuf,
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("{name} dataset has {what}={got}: expected {what}={expected}")]
    Shape {
        name: &'static str,
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("unknown dataset source {0:?}")]
    UnknownSource(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
