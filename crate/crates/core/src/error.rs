use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate tweet ids: {}", .0.join(", "))]
    DuplicateIds(Vec<String>),
    #[error("rating {0} outside [-2, 2]")]
    RatingOutOfRange(i64),
    #[error("event {0} has no ratings")]
    EmptyRatings(String),
    #[error("quantile {0} must lie strictly between 0 and 0.5")]
    QuantileOutOfRange(f64),
    #[error("degenerate thresholds: low {low} is not below high {high}")]
    DegenerateThresholds { low: f64, high: f64 },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("unknown label \"{0}\"")]
    UnknownLabel(String),
    #[error("unknown source kind \"{0}\"")]
    UnknownSourceKind(String),
    #[error("unknown feature \"{0}\"")]
    UnknownFeature(String),
    #[error("training data contains a single class")]
    SingleClass,
    #[error("stance example text is empty")]
    EmptyText,
    #[error("hash bits {0} outside 1..=30")]
    InvalidHashBits(u32),
    #[error("model has {got} weights, expected 2^{bits}")]
    WeightLength { bits: u32, got: usize },
    #[error("negative cumulative value {0} in temporal series")]
    NegativeValue(f64),
    #[error("temporal series minutes must be strictly increasing")]
    NonIncreasingMinutes,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("row width {got} does not match model width {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 folds, got {0}")]
    InvalidFolds(usize),
    #[error("class with {members} members cannot fill {folds} folds")]
    ClassTooSmall { members: usize, folds: usize },
    #[error("contingency table has a zero marginal")]
    ZeroMarginal,
    #[error("need at least {needed} features, got {got}")]
    TooFewFeatures { needed: usize, got: usize },
    #[error("pooled transfer needs at least 2 sources, got {0}")]
    TooFewSources(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
