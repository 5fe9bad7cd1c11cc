use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("not a rational number: {0:?}")]
    Rational(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

/// Every domain failure the library can report.
///
/// Variant names double as the machine-readable error codes emitted by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    // quaternion algebra
    #[error("quaternion algebra parameters must be nonzero")]
    InvalidAlgebra,
    #[error("element has zero reduced norm")]
    ZeroNorm,

    // lattices, orders, ideals
    #[error("generators span a lattice of rank {0} < 4")]
    RankDeficient(usize),
    #[error("lattice is not an order: {0}")]
    NotAnOrder(String),
    #[error("lattice is not a left ideal of the given order")]
    NotLeftIdeal,
    #[error("{0} is not a perfect square")]
    NotASquare(String),
    #[error("{0} is not divisible by {1}")]
    NotDivisible(String, String),
    #[error("ideal is not locally principal: index {0} is not a square")]
    NotLocallyPrincipal(String),
    #[error("lattice containment fails: {0}")]
    NotContained(String),

    // finite level
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),
    #[error("level {level} exceeds the enumeration bound {max}")]
    LevelTooLarge { level: u64, max: u64 },
    #[error("element is not a unit modulo the level")]
    NotAUnit,
    #[error("value {0} cannot be reduced modulo {1}")]
    NotReducible(String, u64),
    #[error("functionals are not invertible modulo the level")]
    SingularFunctionals,
    #[error("functional quadruple admits no equivariant basis: {0}")]
    NotEquivariant(String),
    #[error("element does not normalize the endomorphism image")]
    NotInNormalizer,
    #[error("cocycle defect at ({0}, {1}) is not central")]
    NotCentral(usize, usize),
    #[error("cocycle defect at ({0}, {1}) is central but not a scalar")]
    NotScalar(usize, usize),
    #[error("degree of element {0} is not reducible modulo the level")]
    DegNotReducible(usize),
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),

    // CM
    #[error("no embedding found within search bound {0}")]
    SearchExhausted(u64),
    #[error("no anticommuting element: {0}")]
    NoSolution(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    // cohomology
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("values fail the 2-cocycle identity")]
    NotACocycle,
    #[error("value of alpha at element {0} is not reducible modulo the level")]
    AlphaNotReducible(usize),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("zero cannot be a value in Q^x")]
    ZeroValue,
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::InvalidAlgebra => "InvalidAlgebra",
            Error::ZeroNorm => "ZeroNorm",
            Error::RankDeficient(_) => "RankDeficient",
            Error::NotAnOrder(_) => "NotAnOrder",
            Error::NotLeftIdeal => "NotLeftIdeal",
            Error::NotASquare(_) => "NotASquare",
            Error::NotDivisible(..) => "NotDivisible",
            Error::NotLocallyPrincipal(_) => "NotLocallyPrincipal",
            Error::NotContained(_) => "NotContained",
            Error::LevelMismatch(..) => "LevelMismatch",
            Error::LevelTooLarge { .. } => "LevelTooLarge",
            Error::NotAUnit => "NotAUnit",
            Error::NotReducible(..) => "NotReducible",
            Error::SingularFunctionals => "SingularFunctionals",
            Error::NotEquivariant(_) => "NotEquivariant",
            Error::NotInNormalizer => "NotInNormalizer",
            Error::NotCentral(..) => "NotCentral",
            Error::NotScalar(..) => "NotScalar",
            Error::DegNotReducible(_) => "DegNotReducible",
            Error::InvalidSubgroup(_) => "InvalidSubgroup",
            Error::SearchExhausted(_) => "SearchExhausted",
            Error::NoSolution(_) => "NoSolution",
            Error::InvalidEmbedding(_) => "InvalidEmbedding",
            Error::InvalidGroup(_) => "InvalidGroup",
            Error::NotACocycle => "NotACocycle",
            Error::AlphaNotReducible(_) => "AlphaNotReducible",
            Error::SizeMismatch(_) => "SizeMismatch",
            Error::ZeroValue => "ZeroValue",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
