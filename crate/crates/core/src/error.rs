use thiserror::Error;

/// Errors raised by parsing, validation and the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },

    #[error("gap at {0}")]
    YearGap(i32),

    #[error("duplicate year {0}")]
    DuplicateYear(i32),

    #[error("years must ascend: {year} follows {previous}")]
    DescendingYear { previous: i32, year: i32 },

    #[error("series contains missing values; impute them first")]
    MissingValues,

    #[error("series has no non-missing values")]
    AllMissing,

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("window {from}..={to} lies outside the series range {first}..={last}")]
    OutOfRange {
        from: i32,
        to: i32,
        first: i32,
        last: i32,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
