use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes of the numerical core.
///
/// The variants are grouped the way callers react to them: `InvalidParameter` and
/// `InvalidGrouping` are configuration mistakes, `Data` means the market input broke an
/// invariant, and `Solver` means a linear-algebra kernel could not proceed.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidParameter(String),
    InvalidGrouping(String),
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// A market value or derived quantity left the domain where the losses are finite.
    Data(String),
    /// Nonfinite input to a numeric kernel.
    NonFinite(&'static str),
    Solver(String),
    /// Sharpe ratio of a return series with fewer than two points or zero variance.
    UndefinedSharpe(&'static str),
    /// A strategy failed inside the sub-algorithm grid.
    SubAlgorithm {
        base: usize,
        sector: usize,
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn grouping(msg: impl Into<String>) -> Self {
        Error::InvalidGrouping(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn dims(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }

    /// True when the error stems from market data rather than configuration.
    pub fn is_data_violation(&self) -> bool {
        match self {
            Error::Data(_) | Error::NonFinite(_) => true,
            Error::SubAlgorithm { source, .. } => source.is_data_violation(),
            _ => false,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::InvalidGrouping(m) => write!(f, "invalid grouping: {m}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::Data(m) => write!(f, "data violation: {m}"),
            Error::NonFinite(what) => write!(f, "nonfinite value in {what}"),
            Error::Solver(m) => write!(f, "solver failure: {m}"),
            Error::UndefinedSharpe(why) => write!(f, "Sharpe ratio undefined: {why}"),
            Error::SubAlgorithm {
                base,
                sector,
                source,
            } => write!(f, "sub-algorithm (base {base}, sector {sector}): {source}"),
        }
    }
}

impl core::error::Error for Error {}
