use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid exponent list {0:?}: entries must be positive and non-increasing")]
    InvalidExponents(Vec<u32>),
    #[error("group of order {p}^{log_order} exceeds the cap of {cap} elements")]
    GroupTooLarge { p: u64, log_order: u32, cap: u64 },
    #[error("coordinate {value} out of range for Z/{modulus} at position {index}")]
    CoordinateOutOfRange { index: usize, value: i64, modulus: i64 },
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subgroups live in different ambient groups")]
    AmbientMismatch,
    #[error("subgroup is not contained in the larger group")]
    NotASubgroup,
    #[error("character {index} is not a homomorphism onto Z/p^{target}")]
    IllDefinedCharacter { index: usize, target: u32 },
    #[error("character {index} is not surjective")]
    NonSurjectiveCharacter { index: usize },
    #[error("the fields do not intersect in the base field; common subfield has invariants {invariants:?}")]
    IntersectionNotBase { invariants: Vec<u32> },
    #[error("only {remaining} fields remain after pruning; at least 3 are required")]
    TooFewFields { remaining: usize },
    #[error("degree {degree} out of range (maximum {max})")]
    DegreeOutOfRange { degree: u32, max: u32 },
    #[error("empty index set")]
    EmptyIndexSet,
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("annihilator requires a homocyclic ambient group")]
    NotHomocyclic,
    #[error("vector is not in G_omega")]
    NotInGOmega,
    #[error("vector lies in the diagonal subgroup")]
    InDiagonal,
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("{0} is not in the set of occurring levels")]
    UnknownLevel(u32),
    #[error("predicate is not monotone: {0}")]
    NonMonotone(String),
    #[error("shortcut hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("invalid radicand {0}: {1}")]
    InvalidRadicand(i64, String),
    #[error("{0} independent prime generators exceed the limit of 4")]
    TooManyGenerators(usize),
    #[error("radicands {0} and {1} define the same field")]
    DuplicateField(usize, usize),
    #[error("{0} is not a Gaussian prime")]
    NotGaussianPrime(String),
    #[error("local fact does not hold: {0}")]
    LocalFactMismatch(String),
    #[error("unknown example {0}")]
    UnknownExample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
