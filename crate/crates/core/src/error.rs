use thiserror::Error;

use crate::lattice::IntRect;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rectangle [{a},{b}]x[{c},{d}]: need a <= b and c <= d")]
    InvalidRect { a: i64, b: i64, c: i64, d: i64 },

    #[error("rectangles #{first} {first_rect} and #{second} {second_rect} are incomparable")]
    NotTotallyOrdered {
        first: usize,
        second: usize,
        first_rect: IntRect,
        second_rect: IntRect,
    },

    #[error("window set must be nonempty")]
    EmptyWindow,

    #[error("action (0,0) does not generate a subgroup")]
    ZeroAction,

    #[error("restriction target is not contained in the pattern support")]
    NotASubset,

    #[error("pattern supports differ")]
    SupportMismatch,

    #[error("symbol {symbol} is outside an alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("invalid subshift: {0}")]
    InvalidSft(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure is not supported on the subshift: {0}")]
    MeasureMismatch(String),

    #[error("resource guard exceeded: {0}")]
    Guard(String),

    #[error("the subshift has no bi-infinite point (empty language)")]
    EmptyLanguage,

    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("Blahut-Arimoto did not converge in {iterations} iterations (gap {gap:e} bits)")]
    NoConvergence { iterations: usize, gap: f64 },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
