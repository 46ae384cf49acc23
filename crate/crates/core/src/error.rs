use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid abelian type: {0}")]
    InvalidType(String),
    #[error("{a} is not a unit modulo {modulus}")]
    NotAUnit { a: u64, modulus: u64 },
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("bracket of generators {i} and {j} is not killed by their common order")]
    OrderIncompat { i: usize, j: usize },
    #[error("Jacobi identity fails on generators ({i}, {j}, {k})")]
    JacobiFail { i: usize, j: usize, k: usize },
    #[error("lower central series stabilizes above zero")]
    NotNilpotent,
    #[error("nilpotent action produced a non-nilpotent ring: {0}")]
    NotNilpotentWitness(String),
    #[error("subgroup is not an ideal")]
    NotAnIdeal,
    #[error("object too large for exhaustive treatment: {0}")]
    TooLarge(String),
    #[error("matrix is not a derivation")]
    NotADerivation,
    #[error("p^m does not annihilate the derivation")]
    OrderObstruction,
    #[error("construction hypothesis violated: {0}")]
    SpecViolation(String),
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("BCH degree {0} is not supported (maximum 5)")]
    DegreeUnsupported(usize),
    #[error("nilpotency class {class} is too high for prime {p}")]
    ClassTooHigh { class: usize, p: u64 },
    #[error("denominator {0} is not invertible")]
    DenominatorNotInvertible(i64),
    #[error("group reconstruction diverged: {0}")]
    ReconstructionDivergence(String),
    #[error("unsupported partition {0:?}")]
    UnsupportedPartition(Vec<u32>),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("format error at {location}: {message}")]
    Format { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
