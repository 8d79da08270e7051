use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. Variants are grouped by the layer that
/// produces them; every message is meant to be shown to a user as-is.
#[derive(Debug, Error)]
pub enum Error {
    // shape and numeric failures
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Shape {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    NotConverged { sweeps: usize },

    // parameters
    #[error("exponent p must be a positive finite number, got {0}")]
    Exponent(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("parameter {name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: i64,
        range: &'static str,
    },

    // point sets and distance matrices
    #[error("measure must have at least one atom")]
    EmptyMeasure,
    #[error("atom weight {index} is {weight}, weights must be strictly positive")]
    NonPositiveWeight { index: usize, weight: String },
    #[error("point {label:?} has {found} values, the measure has {expected} atoms")]
    RowLength {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("labels ({labels}) do not match matrix order {order}")]
    LabelCount { labels: usize, order: usize },
    #[error("operation requires a {expected} point set, found {found}")]
    ValueClass { expected: String, found: String },
    #[error("distance matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
    #[error("distance matrix has a nonzero diagonal entry at {0}")]
    NonZeroDiagonal(usize),
    #[error("distance matrix has a negative entry at ({row}, {col})")]
    NegativeDistance { row: usize, col: usize },
    #[error("at least {needed} points are required, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("points {first:?} and {second:?} coincide; strict negative type needs distinct points")]
    DuplicatePoint { first: String, second: String },

    // simplices and certificates
    #[error("simplex side {0} is empty")]
    EmptySide(&'static str),
    #[error("simplex weights do not balance: left sums to {left}, right sums to {right}")]
    UnequalSums { left: String, right: String },
    #[error("point index {index} out of range for a set of {len} points")]
    PointIndex { index: usize, len: usize },
    #[error("unknown point id {0:?}")]
    UnknownPoint(String),
    #[error("inconsistent inputs: {0}")]
    Consistency(String),
    #[error("invalid certificate: {0}")]
    Certificate(String),
    #[error("{0}")]
    Precondition(String),

    // roundness
    #[error("a powered distance matrix cannot be re-powered; supply coordinates or unpowered distances")]
    CannotRepower,

    // files
    #[error("{context}: {message}")]
    Format { context: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn format(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Format {
            context: context.into(),
            message: message.to_string(),
        }
    }
}
