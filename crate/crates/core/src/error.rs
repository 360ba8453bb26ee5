use thiserror::Error;

/// Errors raised by the library. Every variant corresponds to a violated
/// precondition or a resource guard; none of them are recoverable by retrying.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus must be odd (got {0})")]
    EvenModulus(u64),
    #[error("modulus must be greater than 1 (got {0})")]
    ModulusTooSmall(u64),
    #[error("generator out of range: {value} not in [1, {max}]")]
    OutOfRange { value: u64, max: u64 },
    #[error("generators must be strictly increasing")]
    NotStrictlyIncreasing,
    #[error("generator tuple must be non-empty")]
    EmptyTuple,
    #[error("k = {k} too large: at most {max} for this modulus")]
    KTooLarge { k: usize, max: u64 },
    #[error("character index m = {m} out of range [0, {max}]")]
    MOutOfRange { m: u64, max: u64 },
    #[error("tuple modulus {tuple} does not match slice modulus {slice}")]
    MismatchedModulus { tuple: u64, slice: u64 },
    #[error("the m = 0 slice has no lattice point")]
    ZeroSlice,
    #[error("invalid permutation of length {0}")]
    InvalidPermutation(usize),
    #[error("n = {n} too large for a dense eigensolve (max {max})")]
    TooLarge { n: u64, max: u64 },
    #[error("interval [{lo}, {hi}] not contained in [-{r}, {r}]")]
    JOutOfRange { lo: f64, hi: f64, r: u64 },
    #[error("bad interval: {0}")]
    BadInterval(String),
    #[error("tolerance {tolerance:e} not met after {panels} panels (last difference {last_diff:e})")]
    ToleranceNotMet {
        tolerance: f64,
        panels: usize,
        last_diff: f64,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("work budget exceeded: {needed} evaluations requested, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("degree r = {0} must be at least 2")]
    DegreeTooSmall(u64),
    #[error("polynomial coefficients overflowed double precision")]
    CoefficientOverflow,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
