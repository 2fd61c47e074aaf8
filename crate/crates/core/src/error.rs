use thiserror::Error;

use crate::types::{DeviceId, ValidationReport};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("selector list is empty")]
    EmptySelectors,

    #[error("joint estimation over {0} variables exceeds the supported maximum of 6")]
    TooManyVariables(usize),

    #[error("unknown device `{0}`")]
    UnknownDevice(DeviceId),

    #[error("slot {slot} out of range 1..={max}")]
    SlotOutOfRange { slot: usize, max: usize },

    #[error("lag {lag} at slot {slot} out of range 0..={max}")]
    LagOutOfRange { slot: usize, lag: usize, max: usize },

    #[error("dataset has no events")]
    NoEvents,

    #[error("source and target device must differ")]
    SourceEqualsTarget,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid marginalization subset: {0}")]
    InvalidSubset(String),

    #[error("smoothing parameter must be non-negative, got {0}")]
    NegativeSmoothing(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot align traces: {0}")]
    Misaligned(String),

    #[error("dataset failed validation: {0}")]
    InvalidDataset(ValidationReport),

    #[error("insufficient events: have {have}, need at least {need}")]
    InsufficientEvents { have: usize, need: usize },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("directed information {0} outside the provable range [0, 2]")]
    DiOutOfRange(f64),

    #[error("full-sequence oracle requires an even arity of at most 6, got {0}")]
    OracleArity(usize),

    #[error("expected a joint distribution over {expected} variables, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("malformed model: {0}")]
    MalformedModel(String),

    #[error("unsupported model version {0}")]
    ModelVersion(u32),
}
