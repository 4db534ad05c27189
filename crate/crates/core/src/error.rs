use thiserror::Error;

/// Crate-wide error type.  Domain errors carry enough context to be rendered
/// by the CLI without re-deriving state.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by zero in cyclotomic arithmetic")]
    DivisionByZero,

    #[error("element of Q(zeta_{order}) does not lie in Q(zeta_{target})")]
    NotInSubfield { order: u64, target: u64 },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("module order {size} exceeds enumeration bound {bound}")]
    EnumerationBound { bound: u64, size: u64 },

    #[error("module order {size} exceeds dense-matrix bound {bound}")]
    MatrixBound { bound: u64, size: u64 },

    #[error("module order {order} is not a prime power")]
    NotPrimePower { order: u64 },

    #[error("subgroup is not isotropic")]
    NotIsotropic,

    #[error("degenerate quadratic module: {0}")]
    Degenerate(String),

    #[error("invalid module data: {0}")]
    InvalidModule(String),

    #[error("rank must be even for the singular-weight formula (got n = {n})")]
    OddRank { n: usize },

    #[error("rank must be odd for the critical-weight formula (got n = {n})")]
    EvenRank { n: usize },

    #[error("weight {k} below the validity range (need k >= {min})")]
    WeightOutOfRange { k: i64, min: String },

    #[error("dimension formula produced a non-integer or negative total: {total}")]
    NonIntegerDimension { total: String },

    #[error("{which} term of the dimension formula is not rational: {value}")]
    NonRationalTerm { which: &'static str, value: String },

    #[error("index m = {m} is inadmissible: level {level} does not divide 4m")]
    InadmissibleIndex { m: u64, level: u64 },

    #[error("invalid prime argument: {0}")]
    InvalidPrime(u64),

    #[error("not a Jacobi-form expansion for this index: {0}")]
    InconsistentCoefficients(String),

    #[error("series truncation insufficient: tail estimate {tail:.3e} exceeds {budget:.3e}")]
    InsufficientTruncation { tail: f64, budget: f64 },

    #[error("dimension recurrence violated at k = {k}: got {got}, expected {expected}")]
    RecurrenceViolation { k: i64, got: i64, expected: i64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
