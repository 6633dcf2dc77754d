//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    // ring construction / parsing
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("multiplication table is not associative at basis triple ({0},{1},{2})")]
    NonAssociative(usize, usize, usize),
    #[error("multiplication table is not commutative at basis pair ({0},{1})")]
    NonCommutative(usize, usize),
    #[error("designated unit index {0} is not a two-sided unit")]
    NoUnit(usize),
    #[error("malformed ring or element literal: {0}")]
    ParseError(String),
    #[error("denominator {0} is not invertible in this ring")]
    NotInvertibleDenominator(String),
    #[error("operation requires a {expected} ring, got {got}")]
    WrongRingKind { expected: &'static str, got: String },

    // linear algebra
    #[error("operation not supported over this ring: {0}")]
    UnsupportedRing(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    // complexes
    #[error("differentials do not compose to zero at degree {0}")]
    NotAComplex(i64),
    #[error("components do not commute with differentials at degree {0}")]
    NotAChainMap(i64),
    #[error("map does not send relations into relations")]
    NotAModuleMap,
    #[error("tensor product of two complexes with non-free terms is not supported")]
    TwoNonFreeFactors,
    #[error("hom complex requires a source with free terms")]
    NonFreeSource,

    // koszul / adic
    #[error("transition exponents must satisfy m >= n >= 1, got m={m}, n={n}")]
    BadExponents { m: usize, n: usize },
    #[error("change-of-sequence matrix is not invertible")]
    NotInvertible,
    #[error("sequences do not match under the given matrix")]
    SequenceMismatch,

    // cech
    #[error("operation requires a finite coefficient ring")]
    InfiniteRing,
    #[error("instance exceeds the size guard: {0}")]
    TooLarge(String),

    // verify / cli
    #[error("unknown check id: {0}")]
    UnknownCheck(String),
    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
