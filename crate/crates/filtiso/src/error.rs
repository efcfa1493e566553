use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// Mathematical negatives (an inadmissible object, a point outside a stratum)
/// are *results*, not errors; errors are reserved for inputs that violate a
/// documented precondition or for searches that exhaust their budget.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in the coefficient field")]
    DivisionByZero,

    #[error("elements belong to different coefficient fields: {0}")]
    FieldMismatch(String),

    #[error("no embedding of Q(pi), pi^{from_m} = {from_p}, into Q(pi'), pi'^{to_m} = {to_p}")]
    IncompatibleTower {
        from_p: u64,
        from_m: u32,
        to_p: u64,
        to_m: u32,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("adjoint point is malformed: {0}")]
    MalformedPoint(String),

    #[error("constant coefficient has infinite valuation")]
    InfiniteConstantTerm,

    #[error("coweight is not dominant: {0}")]
    NonDominant(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("subspace is not stable under the Frobenius")]
    NotStable,

    #[error("unsupported Frobenius shape: {0}")]
    UnsupportedFrobenius(String),

    #[error("map does not intertwine the Frobenius structures")]
    NotIntertwining,

    #[error("map does not respect the filtrations")]
    NotMorphism,

    #[error("subspaces are not nested")]
    NotNested,

    #[error("operation is undefined on the zero subspace")]
    ZeroSubspace,

    #[error("no weakly admissible witness found within {budget} seeded attempts")]
    SeedBudgetExhausted { budget: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
