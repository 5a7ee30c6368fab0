use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Hypotheses of the Kramers theorems that a caller can violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Premise {
    /// `T^2 = -I`
    FermionCondition,
    /// `[T, H] = 0`
    TInvariance,
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Premise::FermionCondition => f.write_str("fermion condition (T^2 = -I)"),
            Premise::TInvariance => f.write_str("T-invariance ([T, H] = 0)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix must be square with positive size, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("spectrum basis is not unitary (deviation {deviation:e})")]
    InvalidSpectrum { deviation: f64 },
    #[error("reference conjugation must square to +I (deviation {deviation:e})")]
    InvalidReference { deviation: f64 },
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("invalid specification: {0}")]
    Spec(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(Premise),
    #[error("the zero operator is excluded")]
    ZeroOperator,
    #[error("composition is not a scalar multiple of the identity (deviation {deviation:e})")]
    NotScalar { deviation: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Stable machine-readable tag, used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension",
            Error::Shape { .. } => "shape",
            Error::NonFinite { .. } => "non_finite",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotUnitary { .. } => "not_unitary",
            Error::Numerical(_) => "numerical",
            Error::InvalidSpectrum { .. } => "invalid_spectrum",
            Error::InvalidReference { .. } => "invalid_reference",
            Error::EmptyGenerators => "empty_generators",
            Error::Spec(_) => "spec",
            Error::Hypothesis(Premise::FermionCondition) => "hypothesis_fermion_condition",
            Error::Hypothesis(Premise::TInvariance) => "hypothesis_t_invariance",
            Error::ZeroOperator => "zero_operator",
            Error::NotScalar { .. } => "not_scalar",
            Error::Precondition(_) => "precondition",
            Error::Format(_) => "format",
        }
    }
}
