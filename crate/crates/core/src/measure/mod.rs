//! Ranging noise and the historical measurement table.

mod ftm;
mod records;
mod table;

pub use ftm::{ftm_distance, FtmConfig};
pub use records::{read_records, write_records};
pub use table::{select_historical, MeasurementRecord, MeasurementTable, RecordTag, DEFAULT_CAPACITY};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("no usable historical measurement and no first-path record")]
    NoUsableHistory,
    #[error("table capacity must be positive")]
    ZeroCapacity,
    #[error("selection size k must be at least 1")]
    ZeroK,
    #[error("timestamp {got} does not follow the newest record ({last})")]
    NonIncreasingTimestamp { last: u64, got: u64 },
    #[error("ranging noise std must be finite and non-negative, got {0}")]
    InvalidSigma(f64),
    #[error("record line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
