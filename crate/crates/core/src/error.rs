use thiserror::Error;

pub type Result<T> = std::result::Result<T, HstiError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HstiError {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cell index ({cx}, {cy}) out of range for grid depth {g}")]
    CellOutOfRange { cx: u32, cy: u32, g: u32 },

    #[error("morton code {code} out of range (limit {limit})")]
    CodeOutOfRange { code: u64, limit: u64 },

    #[error("point ({x}, {y}, {t}) lies outside the bounds")]
    OutOfBounds { x: f64, y: f64, t: f64 },

    #[error("routing violation: code {zn} is outside region range [{lo}, {hi})")]
    RoutingViolation { zn: u64, lo: u64, hi: u64 },

    #[error("duplicate row key {0}")]
    DuplicateKey(String),

    #[error("cluster size {size} exceeds the {cells} grid cells")]
    TooManyRegions { size: usize, cells: u64 },

    #[error("result checksum mismatch: {0}")]
    ChecksumMismatch(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for HstiError {
    fn from(e: std::io::Error) -> Self {
        HstiError::Io(e.to_string())
    }
}
