//! Exact arithmetic: prime fields and small extensions, truncated power
//! series with explicit precision, Laurent series via valuation tracking,
//! and matrices over those.

mod context;
mod field;
mod matrix;
mod series;

pub use context::ArithContext;
pub use field::{FieldCtx, Fq};
pub use matrix::SeriesMatrix;
pub use series::{DeriveMode, TruncatedSeries, ValuatedSeries};

/// Errors surfaced by the arithmetic layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingError {
    /// A congruence or inversion needed more known coefficients than carried.
    PrecisionExhausted(String),
    /// Matrix inversion hit a determinant that vanishes at working precision.
    SingularMatrix,
    /// Series inversion of a non-unit (zero constant term).
    NonUnit,
    /// No irreducible/primitive polynomial table entry and search failed.
    BadField(String),
    /// Context parameters violate a documented invariant.
    BadContext(String),
}

impl std::fmt::Display for RingError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RingError::PrecisionExhausted(what) => write!(f, "precision exhausted: {what}"),
            RingError::SingularMatrix => write!(f, "singular matrix at working precision"),
            RingError::NonUnit => write!(f, "series is not a unit"),
            RingError::BadField(what) => write!(f, "bad field parameters: {what}"),
            RingError::BadContext(what) => write!(f, "bad context: {what}"),
        }
    }
}

impl std::error::Error for RingError {}
