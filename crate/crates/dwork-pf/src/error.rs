//! Error types shared across the crate.

use thiserror::Error;

/// Errors from the exact-arithmetic substrate.
#[derive(Debug, Clone, Error)]
pub enum ArithError {
    #[error("series has no inverse: constant term is zero")]
    NonUnitSeries,
    #[error("rational function has a pole of order {order} at λ = 0")]
    PoleAtOrigin { order: usize },
    #[error("series is not divisible by λ^{power}")]
    NotDivisible { power: usize },
    #[error("operation undefined for the zero operator")]
    ZeroOperator,
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Errors from family validation and character-vector domain checks.
#[derive(Debug, Clone, Error)]
pub enum FamilyError {
    #[error("weights must sum to d: Σw = {sum}, d = {d}")]
    WeightSum { sum: u64, d: u64 },
    #[error("weights must be positive")]
    NonPositiveWeight,
    #[error("gcd of weights must be 1, found {0}")]
    WeightGcd(u64),
    #[error("need d ≥ n ≥ 3, got n = {n}, d = {d}")]
    SizeOrder { n: usize, d: u64 },
    #[error("character vector has length {got}, family has n = {want}")]
    BadLength { got: usize, want: usize },
    #[error("character coordinates must sum to 0 mod d: Σv ≡ {rem} mod {d}")]
    CoordinateSum { rem: u64, d: u64 },
    #[error("character vector is not totally nonzero: coordinate {index} ≡ 0 mod d")]
    NotTotallyNonzero { index: usize },
    #[error("p = {p} is not invertible mod d = {d}")]
    PNotCoprime { p: u64, d: u64 },
}

/// Errors from the cohomological verification oracle.
#[derive(Debug, Clone, Error)]
pub enum OracleError {
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("unsupported coefficient shape: {0}")]
    UnsupportedCoefficient(String),
}

/// Errors from the deformation pipeline.
#[derive(Debug, Clone, Error)]
pub enum DeformationError {
    /// The derivative basis degenerates at λ = 0; the Wronskian is returned
    /// so the caller can run the canonical-extension correction.
    #[error("cyclic basis fails: W(0) is singular (solution exponents {exponents:?})")]
    CyclicBasisFails {
        exponents: Vec<u64>,
        wronskian: crate::deformation::SeriesMatrix,
    },
    #[error("degenerate hypergeometric lower parameter {param}")]
    DegenerateParameter { param: String },
    #[error("unsupported monodromy: {0}")]
    UnsupportedMonodromy(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("p = {p} must be prime to d and to every weight")]
    BadPrime { p: u64 },
    #[error("truncation order {order} too small: need at least {need}")]
    OrderTooSmall { order: usize, need: usize },
}
