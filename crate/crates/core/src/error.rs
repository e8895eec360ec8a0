use alloc::string::String;

/// Which resource limit a computation ran into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Pairs,
    Degree,
    Depth,
    Search,
    Iterations,
}

impl core::fmt::Display for Budget {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Budget::Pairs => "s-pair budget",
            Budget::Degree => "degree budget",
            Budget::Depth => "recursion depth budget",
            Budget::Search => "search budget",
            Budget::Iterations => "iteration budget",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0} is out of range (must be a prime below 2^16)")]
    ModulusOutOfRange(u32),
    #[error("structural mismatch: {0}")]
    Structure(String),
    #[error("{0} exceeded")]
    BudgetExceeded(Budget),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("too many variables ({0}); at most {max} are supported", max = crate::corering::MAX_VARS)]
    TooManyVariables(usize),
    #[error("ideals are not comaximal")]
    NotComaximal,
    #[error("cofactor tracking is required for this operation")]
    CofactorsRequired,
    #[error("ill-defined morphism: relation `{0}` does not map to zero")]
    IllDefinedMorphism(String),
    #[error("presentation is the zero algebra")]
    ZeroAlgebra,
    #[error("operation requires {0}")]
    Precondition(String),
    #[error("engine fault: {0}")]
    EngineFault(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded(_))
    }
}

pub type Result<T> = core::result::Result<T, Error>;
