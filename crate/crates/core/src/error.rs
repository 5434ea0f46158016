use std::path::PathBuf;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a finite number")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dataset is already scaled")]
    AlreadyScaled,

    #[error("dataset must be standard-scaled first")]
    NotScaled,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("assignment ({v}, {u}) is not a variable of the instance")]
    SupportOutsideInstance { v: usize, u: usize },

    #[error("no fair clustering exists for these parameters: {0}")]
    Infeasible(String),

    #[error("LP solver failed: {0}")]
    Solver(String),

    #[error("every point was marked as an outlier")]
    AllOutliers,

    #[error(
        "filtering selected {found} representatives for k = {k} (total coverage deficit {deficit:.3e})"
    )]
    TooManyRepresentatives { found: usize, k: usize, deficit: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("exhaustive search limited to n <= {max}, got n = {n}")]
    InstanceTooLarge { n: usize, max: usize },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures that indicate a broken guarantee rather than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::Invariant(_) | Error::TooManyRepresentatives { .. }
        )
    }
}
