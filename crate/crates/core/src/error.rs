use thiserror::Error;

use crate::EstimatorKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("{estimator} needs at least {min} observations, got {n}")]
    TooSmall {
        estimator: EstimatorKind,
        n: usize,
        min: usize,
    },

    #[error("{estimator} pair expansion is limited to n <= {max}, got {n}")]
    SizeLimit {
        estimator: EstimatorKind,
        n: usize,
        max: usize,
    },

    #[error("order statistic index {k} out of range for {len} values")]
    IndexOutOfRange { k: usize, len: usize },

    #[error("no tabulated or modelled value for {what} at n = {n}")]
    Unavailable { what: &'static str, n: usize },

    #[error("least-squares system is singular: {0}")]
    SingularFit(String),

    #[error("power-law fit needs observations of one strict sign: {0}")]
    MixedSign(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
