use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("{n} is not squarefree: {prime}^2 divides it")]
    NotSquarefree { n: u64, prime: u64 },
    #[error("cofactor {cofactor} of {n} has no prime factor up to {bound} and is too large to be prime-certified")]
    NotFactorable { n: u64, cofactor: u64, bound: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{a} is not invertible modulo {n}")]
    NotCoprime { a: u64, n: u64 },
    #[error("moduli {a} and {b} are not coprime")]
    ModuliNotCoprime { a: u64, b: u64 },
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("operands live in different rings: Z_{left} vs Z_{right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("polynomial of degree {degree} is not constant")]
    NotConstant { degree: usize },
    #[error("expected {expected} prime factors, found {found}")]
    WrongPrimeCount { expected: usize, found: usize },
    #[error("search needs {states} states, budget is {budget}")]
    BudgetExceeded { states: String, budget: u64 },
    #[error("{d} is not an idempotent of Z_{n}")]
    NotIdempotentDet { d: u64, n: u64 },
    #[error("classification needs exactly three primes all greater than 3, got {primes:?}")]
    PrimesOutOfScope { primes: Vec<u64> },
    #[error("idempotent matrix with non-constant determinant or trace: {0}")]
    InternalTheoremViolation(String),
    #[error("cannot satisfy side condition: {0}")]
    UnsatisfiableParams(String),
    #[error("inconsistent class label: {0}")]
    InconsistentLabel(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid matrix file: {0}")]
    InvalidMatrixFile(String),
}

impl Error {
    /// Stable upper-snake-case identifier used in machine-readable error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidModulus(_) => "INVALID_MODULUS",
            Error::NotSquarefree { .. } => "NOT_SQUAREFREE",
            Error::NotFactorable { .. } => "NOT_FACTORABLE",
            Error::NotPrime(_) => "NOT_PRIME",
            Error::NotCoprime { .. } => "NOT_COPRIME",
            Error::ModuliNotCoprime { .. } => "MODULI_NOT_COPRIME",
            Error::Overflow(_) => "OVERFLOW",
            Error::ModulusMismatch { .. } => "MODULUS_MISMATCH",
            Error::NotConstant { .. } => "NOT_CONSTANT",
            Error::WrongPrimeCount { .. } => "WRONG_PRIME_COUNT",
            Error::BudgetExceeded { .. } => "BUDGET_EXCEEDED",
            Error::NotIdempotentDet { .. } => "NOT_IDEMPOTENT_DET",
            Error::PrimesOutOfScope { .. } => "PRIMES_OUT_OF_SCOPE",
            Error::InternalTheoremViolation(_) => "INTERNAL_THEOREM_VIOLATION",
            Error::UnsatisfiableParams(_) => "UNSATISFIABLE_PARAMS",
            Error::InconsistentLabel(_) => "INCONSISTENT_LABEL",
            Error::Parse(_) => "PARSE",
            Error::InvalidMatrixFile(_) => "INVALID_MATRIX_FILE",
        }
    }
}
