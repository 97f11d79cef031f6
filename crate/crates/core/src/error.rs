use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset contains no transactions")]
    EmptyDataset,

    #[error("attribute index {attr} out of range (dataset has {n_attrs} attributes)")]
    AttributeOutOfRange { attr: usize, n_attrs: usize },

    #[error("threshold {sigma} outside [1, {n_rows}]")]
    ThresholdOutOfRange { sigma: u32, n_rows: u32 },

    #[error(
        "sigma_max {sigma_max} exceeds the number of rows {n_rows}; thresholds are absolute row counts, clamp sigma_max to {n_rows}"
    )]
    SigmaAboveRows { sigma_max: u32, n_rows: u32 },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("isotonic fit: {0}")]
    Isotonic(String),

    #[error("exact enumeration exceeded the cap of {cap} itemsets")]
    CapExceeded { cap: u64 },

    #[error("run cancelled")]
    Cancelled,

    #[error("unknown {kind} strategy {name:?} (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("malformed {what}: {message}")]
    Format { what: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
