use thiserror::Error;

/// Errors raised by measure construction and the identity computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight {value} at index {index} is negative")]
    NegativeWeight { index: usize, value: f64 },

    #[error("support is empty")]
    EmptySupport,

    #[error("total mass must be positive and finite (got {mass})")]
    ZeroMass { mass: f64 },

    #[error("support points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("point {index} has dimension {actual}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        actual: usize,
    },

    #[error("value {value} at index {index} is not finite")]
    NonFiniteValue { index: usize, value: f64 },

    #[error("expected a probability measure, total mass is {mass}")]
    NonProbabilityMeasure { mass: f64 },

    #[error("invalid grid [{lo}, {hi}] with {n_cells} cells")]
    InvalidGrid { lo: f64, hi: f64, n_cells: usize },

    #[error("measures do not share one representation")]
    RepresentationMismatch,

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("x index {index} out of range for {len} rows")]
    XIndexOutOfRange { index: usize, len: usize },

    #[error("mixing weight {0} outside (0, 1)")]
    AlphaOutOfRange(f64),

    #[error("lambda must be finite with |lambda| >= 1e-12 (got {0})")]
    InvalidLambda(f64),

    #[error("{what} is not absolutely continuous with respect to {reference}{}", at_x(.x_index))]
    NotAbsolutelyContinuous {
        what: String,
        reference: String,
        x_index: Option<usize>,
    },

    #[error("log-partition is infinite at x index {x_index}")]
    InfiniteLogPartition { x_index: usize },

    #[error("marginal and conditional at x index {x_index} are not mutually absolutely continuous")]
    MutualContinuityViolated { x_index: usize },

    #[error("no stationary point after {iters} iterations (last objective change {last_change:e})")]
    NonConvergence { iters: usize, last_change: f64 },

    #[error("expectation is not finite")]
    NonFiniteExpectation,

    #[error("divergence term {term} is infinite")]
    InfiniteDivergence { term: String },
}

fn at_x(x_index: &Option<usize>) -> String {
    match x_index {
        Some(i) => format!(" at x index {i}"),
        None => String::new(),
    }
}

impl Error {
    /// Stable variant name, used by scenario files to declare expected failures.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::EmptySupport => "EmptySupport",
            Error::ZeroMass { .. } => "ZeroMass",
            Error::DuplicatePoint { .. } => "DuplicatePoint",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::NonProbabilityMeasure { .. } => "NonProbabilityMeasure",
            Error::InvalidGrid { .. } => "InvalidGrid",
            Error::RepresentationMismatch => "RepresentationMismatch",
            Error::IndexMismatch(_) => "IndexMismatch",
            Error::XIndexOutOfRange { .. } => "XIndexOutOfRange",
            Error::AlphaOutOfRange(_) => "AlphaOutOfRange",
            Error::InvalidLambda(_) => "InvalidLambda",
            Error::NotAbsolutelyContinuous { .. } => "NotAbsolutelyContinuous",
            Error::InfiniteLogPartition { .. } => "InfiniteLogPartition",
            Error::MutualContinuityViolated { .. } => "MutualContinuityViolated",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::NonFiniteExpectation => "NonFiniteExpectation",
            Error::InfiniteDivergence { .. } => "InfiniteDivergence",
        }
    }

    pub(crate) fn at_x_index(self, x: usize) -> Self {
        match self {
            Error::NotAbsolutelyContinuous {
                what,
                reference,
                x_index: None,
            } => Error::NotAbsolutelyContinuous {
                what,
                reference,
                x_index: Some(x),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
