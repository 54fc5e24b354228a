use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("choice arity: expected {expected} choices, got {got}")]
    ChoiceArity { expected: usize, got: usize },

    #[error("no anchors: the tree is inactive")]
    NoAnchors,

    #[error("malformed profile: {0}")]
    MalformedProfile(String),

    #[error("kraft violation: sum is {0}, expected 1")]
    KraftViolation(BigRational),

    #[error("parity violation at level {level}: {value} is odd")]
    ParityViolation { level: usize, value: u128 },

    #[error("level {level} out of range for a profile of height {height}")]
    LevelOutOfRange { level: usize, height: usize },

    #[error("rank {rank} out of range: there are {count} patterns")]
    RankOutOfRange { rank: String, count: String },

    #[error("cannot draw below zero")]
    EmptyRange,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid tree at node {node}: {reason}")]
    InvalidTree { node: usize, reason: String },

    #[error("bound exceeded: {what} = {value} (maximum {max})")]
    BoundExceeded {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("insufficient draws: {total} draws for {outcomes} outcomes (need {needed})")]
    InsufficientDraws {
        total: u64,
        outcomes: usize,
        needed: u64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
