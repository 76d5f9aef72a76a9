use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("edge {{{0}, {1}}} references a node outside 0..{2}")]
    NodeOutOfRange(usize, usize, usize),

    #[error("schedule exhausted: slot {slot} requested but only {len} matrices available")]
    ScheduleExhausted { slot: usize, len: usize },

    #[error("matrix is not a valid adjacency matrix: {0}")]
    InvalidMatrix(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty shard or dataset")]
    EmptyShard,

    #[error("step size {alpha} violates alpha < 1/L = {limit}")]
    StepSize { alpha: f64, limit: f64 },

    #[error("schedule failed validation: {0}")]
    InvalidSchedule(String),

    #[error("non-finite value at iteration {iteration} (agent {agent:?})")]
    NonFinite {
        iteration: usize,
        agent: Option<usize>,
    },

    #[error("trace is missing snapshots required for replay")]
    MissingSnapshots,

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
