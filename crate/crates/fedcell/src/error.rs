//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("distance {0} m is below the 1 m minimum supported by the path-loss model")]
    DegenerateGeometry(f64),
    #[error("target latency {target_s} s does not exceed the slowest compute latency {max_comp_s} s")]
    InfeasibleTarget { target_s: f64, max_comp_s: f64 },
    #[error("bisection did not reach epsilon = {epsilon} within {iterations} iterations (epsilon too small for f64)")]
    NoConvergence { epsilon: f64, iterations: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("scheduled count {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("brute-force search supports at most {max} devices, got {got}")]
    TooManyDevices { got: usize, max: usize },
    #[error("regression system is singular: need at least two distinct subset sizes")]
    SingularFit,
    #[error("{path}: bad IDX magic: expected {expected:#010x}, found {found:#010x}")]
    IdxMagic {
        path: PathBuf,
        expected: u32,
        found: u32,
    },
    #[error("{path}: truncated IDX payload: expected {expected} bytes after the header, found {found}")]
    IdxTruncated {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error("image/label count mismatch: {images} images vs {labels} labels")]
    IdxCountMismatch { images: usize, labels: usize },
    #[error("label {0} outside the supported 0..=9 class range")]
    InvalidLabel(u8),
    #[error("parameter shape mismatch")]
    ShapeMismatch,
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("not enough samples: requested {requested}, available {available}")]
    InsufficientSamples { requested: usize, available: usize },
    #[error("policy returned an empty schedule")]
    EmptySchedule,
    #[error("no run reached the target accuracy; nothing to fit")]
    AllCensored,
    #[error("this operation requires homogeneous device profiles")]
    HeterogeneousProfiles,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code. Configuration/schema problems and runtime faults are
    /// distinguished so scripts can tell them apart.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) => 2,
            _ => 3,
        }
    }
}
