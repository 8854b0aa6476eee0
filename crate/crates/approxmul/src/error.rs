//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operand {value} does not fit in {bits} bits")]
    OperandWidth { value: u64, bits: u32 },

    #[error("enumeration over {bits} input bits exceeds the {cap}-bit cap")]
    WidthCap { bits: u32, cap: u32 },

    #[error("unknown multiplier `{name}` (valid: {valid})")]
    UnknownModel { name: String, valid: String },

    #[error("unknown aggregation variant {0} (valid: 1, 2, 3)")]
    UnknownVariant(u8),

    #[error("cannot prune the low-by-low product")]
    PruneLowLow,

    #[error("unknown sub-multiplier id M{0}")]
    UnknownSubMultiplier(u8),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: u64, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("accumulator {0} exceeds the 2^31 overflow guard")]
    AccumulatorOverflow(i64),

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
