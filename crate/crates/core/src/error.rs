use thiserror::Error;

/// Errors raised by factorization, update, and cost-model routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("position {pos} out of range {lo}..={hi}")]
    PositionOutOfRange { pos: usize, lo: usize, hi: usize },

    #[error("duplicate or unsorted position {0}")]
    DuplicatePosition(usize),

    #[error("matrix is numerically rank deficient at column {column} (|pivot| = {pivot:e})")]
    RankDeficient { column: usize, pivot: f64 },

    #[error("triangular matrix has a zero diagonal entry at {0}")]
    SingularTriangular(usize),

    #[error("deleting {m} rows from {n} would leave fewer rows than the {p} columns")]
    WouldUnderdetermine { n: usize, m: usize, p: usize },

    #[error("downdate breakdown at diagonal {index}: squared value {value:e}")]
    DowndateBreakdown { index: usize, value: f64 },

    #[error("new column {index} is numerically dependent (squared diagonal {value:e})")]
    NearDependentColumn { index: usize, value: f64 },

    #[error("inverse update is singular: pivot {0:e}")]
    SingularUpdate(f64),

    #[error("invalid cost query: {0}")]
    InvalidQuery(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_pos(pos: usize, lo: usize, hi: usize) -> Result<()> {
    if pos < lo || pos > hi {
        Err(Error::PositionOutOfRange { pos, lo, hi })
    } else {
        Ok(())
    }
}
