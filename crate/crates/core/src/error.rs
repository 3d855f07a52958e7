use thiserror::Error;

use crate::sequence::History;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input sequence is empty")]
    EmptySequence,

    #[error("sequence of length {len} is too short for windows of length {window}")]
    SequenceTooShort { len: usize, window: usize },

    #[error("history {0:?} has no observed continuation")]
    UnobservedHistory(History),

    #[error("cannot pool an empty set of histories")]
    EmptyState,

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    #[error("significance level {0} is outside (0, 1)")]
    InvalidAlpha(f64),

    #[error("maximum history length must be at least {min}, got {got}")]
    InvalidHistoryLength { min: usize, got: usize },

    #[error("state {0} has no outgoing transitions")]
    DeadEnd(usize),

    #[error("{n} histories exceed the brute-force limit of {limit}")]
    TooLargeForOracle { n: usize, limit: usize },

    #[error("more than {cap} exact covers")]
    CoverOverflow { cap: usize },

    #[error("search deadline exceeded")]
    Timeout,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid machine: {0}")]
    InvalidMachine(String),
}
