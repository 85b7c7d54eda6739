use alloc::boxed::Box;
use alloc::string::String;

use crate::projred::ReductionImage;

/// Every failure the library can report.
///
/// Variants are grouped loosely by module; callers usually only need to
/// distinguish precondition violations from certification failures (see
/// [`Error::is_certification_failure`]).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("operands live over different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("division by an element that is zero to its precision")]
    DivisionByZeroToPrecision,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("odd valuation {0}: not a square")]
    OddValuation(i64),
    #[error("unit is not a square")]
    NotASquare,

    #[error("every entry is zero to its precision")]
    AllZeroToPrecision,
    #[error("hull cannot be certified: {0}")]
    UncertifiableHull(String),
    #[error("minimum height of the Newton polygon is not attained within the truncation")]
    MinimumNotAttained,
    #[error("N is undefined for this series")]
    NUndefined,
    #[error("preparation did not converge after {0} iterations")]
    PrecisionExhausted(usize),

    #[error("subdivision exceeded max depth {max_depth}")]
    MaxDepthExceeded { max_depth: u32, partial: Box<ReductionImage> },
    #[error("components share a non-constant common factor")]
    CommonRoot,

    #[error("discriminant is zero to precision")]
    ZeroDiscriminant,
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("recursion exceeded depth guard {0}")]
    DepthGuardExceeded(u32),
    #[error("point reduces to a non-smooth point ({0})")]
    LandsOnNonSmooth(String),
    #[error("point is not on the curve to working precision")]
    NotOnCurve,

    #[error("special fiber is not smooth")]
    BadReduction,
    #[error("truncation {0} too small")]
    InsufficientTruncation(usize),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// Failures of an internal certificate rather than of the caller's input.
    pub fn is_certification_failure(&self) -> bool {
        matches!(
            self,
            Error::LandsOnNonSmooth(_) | Error::UncertifiableHull(_) | Error::PrecisionExhausted(_)
        )
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
