use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("beta prior with mean {mean} and sd {sd} has nonpositive parameters")]
    InfeasibleThetaPrior { mean: f64, sd: f64 },
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("{p} candidate covariates exceed the enumeration limit of {max}")]
    TooManyCovariates { p: usize, max: usize },
    #[error("fold {0} has no observations")]
    EmptyFold(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Linalg(#[from] qrkit_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
