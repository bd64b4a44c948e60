use crate::ItemId;

/// Errors raised by the monitoring engine.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid prior: change probability {0} is outside (0, 1)")]
    InvalidPrior(f64),

    #[error("degenerate likelihood ratio: {0}")]
    DegenerateLikelihood(String),

    #[error("density does not integrate to one (integral {integral})")]
    NotNormalized { integral: f64 },

    #[error("invalid density parameter: {0}")]
    InvalidDensity(String),

    #[error("invalid parameter grid: {0}")]
    InvalidGrid(String),

    #[error("sequence of length {len} exceeds the enumeration limit {limit}")]
    TooLong { len: usize, limit: usize },

    #[error("invalid score {score} for item {item}")]
    InvalidScore { item: ItemId, score: f64 },

    #[error("duplicate item id {0}")]
    DuplicateItem(ItemId),

    #[error("unknown item id {0}")]
    UnknownItem(ItemId),

    #[error("risk threshold {0} is outside (0, 1)")]
    InvalidAlpha(f64),

    #[error("no anchor items")]
    NoAnchorItems,

    #[error("degenerate anchor information (kappa = {0:e})")]
    DegenerateAnchorInformation(f64),

    #[error("degenerate standard error for item {0}")]
    DegenerateStandardError(ItemId),

    #[error("malformed responses: {0}")]
    MalformedResponses(String),

    #[error("invalid item parameters: {0}")]
    InvalidItem(String),

    #[error("invalid configuration `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("selection of {requested} items from a pool of {available}")]
    SelectionTooLarge { requested: usize, available: usize },

    #[error("trajectories have mismatched horizons ({expected} vs {found})")]
    MismatchedHorizons { expected: usize, found: usize },

    #[error("no trajectories to aggregate")]
    NoTrajectories,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
