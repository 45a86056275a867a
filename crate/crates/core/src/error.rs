//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("modulus is not a monic irreducible polynomial of degree {0}")]
    ReducibleModulus(u32),
    #[error("field size p^n = {0} is outside the supported range")]
    FieldTooLarge(u64),
    #[error("objects live over different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("element code {0} is not in the field")]
    BadElement(u64),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("quadratic has zero constant term")]
    SingularQuadratic,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("clannish condition {condition} fails at {location}")]
    ClannishViolation { condition: String, location: String },
    #[error("special loop {loop_name}: {reason}")]
    BadQuadratic { loop_name: String, reason: String },
    #[error("no valid sign assignment exists")]
    NoSignAssignment,
    #[error("path is not composable: {0}")]
    NonComposablePath(String),
    #[error("words cannot be concatenated: {0}")]
    NonConcatenable(String),
    #[error("words are not comparable: {0}")]
    NotComparable(String),
    #[error("position {0} does not carry a star letter")]
    NotStarLetter(i64),
    #[error("descriptor is not symmetric")]
    NotSymmetric,
    #[error("word is not end-admissible")]
    NotEndAdmissible,
    #[error("word is not right-end-admissible")]
    NotRightEndAdmissible,
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("invalid parameter matrix: {0}")]
    InvalidParameterMatrix(String),
    #[error("spaces do not match: {0}")]
    SpaceMismatch(String),
    #[error("modules belong to different presentations or quivers")]
    PresentationMismatch,
    #[error("module too large for brute force: prime-field dimension {dim} exceeds {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("relation law fails: {0}")]
    LawViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPrime(_) => "NonPrime",
            Error::ReducibleModulus(_) => "ReducibleModulus",
            Error::FieldTooLarge(_) => "FieldTooLarge",
            Error::FieldMismatch => "FieldMismatch",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::BadElement(_) => "BadElement",
            Error::SingularMatrix => "SingularMatrix",
            Error::SingularQuadratic => "SingularQuadratic",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::ClannishViolation { .. } => "ClannishViolation",
            Error::BadQuadratic { .. } => "BadQuadratic",
            Error::NoSignAssignment => "NoSignAssignment",
            Error::NonComposablePath(_) => "NonComposablePath",
            Error::NonConcatenable(_) => "NonConcatenable",
            Error::NotComparable(_) => "NotComparable",
            Error::NotStarLetter(_) => "NotStarLetter",
            Error::NotSymmetric => "NotSymmetric",
            Error::NotEndAdmissible => "NotEndAdmissible",
            Error::NotRightEndAdmissible => "NotRightEndAdmissible",
            Error::InvalidWord(_) => "InvalidWord",
            Error::InvalidParameterMatrix(_) => "InvalidParameterMatrix",
            Error::SpaceMismatch(_) => "SpaceMismatch",
            Error::PresentationMismatch => "PresentationMismatch",
            Error::TooLarge { .. } => "TooLarge",
            Error::LawViolation(_) => "LawViolation",
            Error::Parse(_) => "Parse",
            Error::UnknownName(_) => "UnknownName",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
