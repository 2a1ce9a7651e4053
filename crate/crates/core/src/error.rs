use std::fmt;

use thiserror::Error;

/// Which of the two support inclusions of a binary covert channel failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportAssumption {
    /// `supp(sigma1) ⊆ supp(sigma0)` on Bob's side.
    Bob,
    /// `supp(omega1) ⊆ supp(omega0)` on Willie's side.
    Willie,
}

impl fmt::Display for SupportAssumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bob => write!(f, "supp(sigma1) is not contained in supp(sigma0)"),
            Self::Willie => write!(f, "supp(omega1) is not contained in supp(omega0)"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("reference operator is singular (smallest eigenvalue {min_eigenvalue:.3e})")]
    SingularReference { min_eigenvalue: f64 },

    #[error("hockey-stick parameter must be >= 1, got {0}")]
    InvalidGamma(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Kraus operators are not trace preserving (defect {defect:.3e})")]
    NotTracePreserving { defect: f64 },

    #[error("map is not an isometry (defect {defect:.3e})")]
    NotIsometry { defect: f64 },

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("channel assumption violated: {0}")]
    AssumptionViolation(SupportAssumption),

    #[error("Willie's test is trivial: omega1 equals omega0")]
    TrivialTest,

    #[error("dense dimension {dim} exceeds the budget cap {cap}")]
    BudgetExceeded { dim: usize, cap: usize },

    #[error("codeword {word} repeats within message {message}")]
    DuplicateWord { message: usize, word: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
