use thiserror::Error;

/// Errors raised by the arithmetic and dynamics operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("expected a p-adic unit, got valuation {0}")]
    NotAUnit(String),
    #[error("v(a - 1) = {0} is outside the convergence region of the p-adic logarithm")]
    OutsideLogRegion(String),
    #[error("empty input")]
    Empty,
    #[error("negative coefficient valuation {valuation} at index {index}: not a series over the p-adic integers")]
    NegativeValuation { index: usize, valuation: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("both homogeneous coordinates are zero")]
    ZeroPoint,
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("both forms vanish identically")]
    ZeroForms,
    #[error("the forms share a nonconstant common factor")]
    CommonFactor,
    #[error("the map does not have good reduction (v(Res) = {0})")]
    BadReduction(String),
    #[error("both forms vanish at the point")]
    Undefined,
    #[error("the point at infinity is not fixed")]
    InfinityNotFixed,
    #[error("the point is not fixed by the map")]
    NotFixed,
    #[error("point is periodic with period {0}")]
    Periodic(usize),
    #[error("the point is a torsion x-coordinate (division polynomial vanishes at level {0})")]
    Torsion(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
