use thiserror::Error;

/// Errors raised by the engine, cohesion and metrics layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dataset has no patterns")]
    EmptyDataset,
    #[error("dataset has no nodes")]
    NoNodes,
    #[error("pattern {pattern} has {found} inputs, expected {expected}")]
    RaggedPattern {
        pattern: usize,
        expected: usize,
        found: usize,
    },
    #[error("pattern {pattern}, node {node}: input must be non-negative")]
    NegativeInput { pattern: usize, node: usize },
    #[error("signal strength must be non-negative")]
    NegativeSignal,
    #[error("strong-signal threshold must be non-negative")]
    NegativeThreshold,
    #[error("pass count must be at least 1")]
    ZeroPasses,
    #[error("invalid presentation order: {0}")]
    InvalidOrder(String),
    #[error("unknown pattern id {0}")]
    UnknownPattern(usize),
    #[error("pattern {0} was already presented in this pass")]
    RepeatedPattern(usize),
    #[error("no pass is in progress")]
    NoPassInProgress,
    #[error("a pass is already in progress")]
    PassInProgress,
    #[error("pass incomplete: {presented} of {expected} patterns presented")]
    IncompletePass { presented: usize, expected: usize },
    #[error("node {0} out of range")]
    UnknownNode(usize),
    #[error("pass {pass} out of range (1..={available})")]
    PassOutOfRange { pass: usize, available: usize },
    #[error("cannot cluster an empty value list")]
    EmptyClusterInput,
    #[error("operation requires a binary (0/1) dataset")]
    NonBinaryDataset,
    #[error("operation requires accumulate mode")]
    AccumulateModeRequired,
    #[error("need at least {required} passes, got {passes}")]
    TooFewPasses { passes: usize, required: usize },
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("exhaustive sweep over {patterns} patterns exceeds the limit of {max}")]
    TooManyOrderings { patterns: usize, max: usize },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
