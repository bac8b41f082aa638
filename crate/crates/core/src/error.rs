use thiserror::Error;

use crate::levelsets::{FuzzyNCell, Side};

pub type Result<T> = std::result::Result<T, FuzzyError>;

#[derive(Debug, Error, Clone)]
pub enum FuzzyError {
    #[error("operands live on different level grids")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index out of range: {what} {index} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invalid level grid: {0}")]
    InvalidGrid(String),

    #[error("endpoint ordering violated: {0}")]
    OrderViolation(String),

    #[error("non-finite endpoint at cell {cell}, level {level}")]
    NonFinite { cell: usize, level: usize },

    #[error("invalid level sets at cell {cell}, level {level} ({side:?} endpoint, excess {excess:e})")]
    InvalidLevelSets {
        cell: usize,
        level: usize,
        side: Side,
        excess: f64,
    },

    #[error("product violates level-set monotonicity at cell {cell}, level {level} ({side:?} endpoint, excess {excess:e})")]
    MonotonicityViolation {
        cell: usize,
        level: usize,
        side: Side,
        excess: f64,
    },

    #[error("result is not representable as a fuzzy n-cell number: {0}")]
    NotRepresentable(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("point {point:?} lies outside the domain")]
    DomainViolation { point: Vec<f64> },

    #[error("missing domain box: {0}")]
    MissingDomain(&'static str),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("finite differences did not converge (last change {last_change:e})")]
    NoConvergence { last_change: f64 },

    #[error("not differentiable along coordinate {coordinate}: one-sided assemblies differ by {distance:e}")]
    NotDifferentiable {
        coordinate: usize,
        distance: f64,
        right: Box<FuzzyNCell>,
        left: Box<FuzzyNCell>,
    },

    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("point is infeasible for constraint {constraint}")]
    InfeasiblePoint { constraint: usize },

    #[error("multiplier {index} is negative ({value})")]
    NegativeMultiplier { index: usize, value: f64 },

    #[error("iteration limit {0} reached")]
    MaxIterations(usize),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for FuzzyError {
    fn from(e: csv::Error) -> Self {
        FuzzyError::Csv(e.to_string())
    }
}
