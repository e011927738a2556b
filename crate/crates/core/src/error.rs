//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("reduction mod p is not squarefree")]
    NotSquarefree,
    #[error("factors do not multiply to the polynomial mod p")]
    FactorMismatch,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("root certification failed at the maximum precision")]
    PrecisionExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TropError {
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("numeric literal at byte {offset} is not 0 and does not multiply a subterm")]
    ConstantError { offset: usize },
    #[error("term needs {needed} arguments, got {got}")]
    ArityMismatch { needed: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Term(#[from] TropError),
    #[error("unsupported ramification: minimal polynomial is not squarefree mod {p}")]
    UnsupportedRamification { p: String },
    #[error("precision budget exhausted")]
    PrecisionExhausted,
    #[error("element is zero")]
    ZeroElement,
    #[error("element and place belong to different carriers")]
    CarrierMismatch,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("point lies on the support of template function {index}")]
    PointOnSupport { index: usize },
    #[error("tuples are not conjugate under the field automorphism")]
    NotConjugate,
    #[error("the generator 2 is required for normalization")]
    MissingGenerator2,
    #[error("tolerance {epsilon} does not exceed the perturbation bound {bound}")]
    ToleranceTooTight { epsilon: String, bound: String },
    #[error("objective is unbounded below on the sampled atoms")]
    Unbounded,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("no candidate satisfies the equations")]
    NoCandidateSatisfiesEquations,
}

impl Error {
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::PrecisionExhausted | Error::Algebra(AlgebraError::PrecisionExhausted))
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Algebra(AlgebraError::PrecisionExhausted) | Error::PrecisionExhausted => "PrecisionExhausted",
            Error::Algebra(_) => "AlgebraError",
            Error::Term(TropError::SyntaxError { .. }) => "SyntaxError",
            Error::Term(TropError::ConstantError { .. }) => "ConstantError",
            Error::Term(TropError::ArityMismatch { .. }) => "ArityMismatch",
            Error::UnsupportedRamification { .. } => "UnsupportedRamification",
            Error::ZeroElement => "ZeroElement",
            Error::CarrierMismatch => "CarrierMismatch",
            Error::InvalidField(_) => "InvalidField",
            Error::InvalidElement(_) => "InvalidElement",
            Error::PointOnSupport { .. } => "PointOnSupport",
            Error::NotConjugate => "NotConjugate",
            Error::MissingGenerator2 => "MissingGenerator2",
            Error::ToleranceTooTight { .. } => "ToleranceTooTight",
            Error::Unbounded => "Unbounded",
            Error::InvalidInstance(_) => "InvalidInstance",
            Error::NoCandidateSatisfiesEquations => "NoCandidateSatisfiesEquations",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
