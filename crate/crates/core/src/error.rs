//! Error type shared by all engine modules.

use thiserror::Error;

/// Errors surfaced by the engine. Every fallible public operation returns
/// one of these; internal invariant violations panic instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different coefficient rings")]
    RingMismatch,
    #[error("element is not a unit in this ring")]
    NonUnit,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("operation not supported over this coefficient ring: {0}")]
    UnsupportedRing(String),
    #[error("ring/ideal-mode combination not supported: {0}")]
    UnsupportedRingModeCombination(String),
    #[error("pd truncation bounds differ between operands")]
    TruncationMismatch,
    #[error("element has a nonzero weight-0 component")]
    NotInAugmentationIdeal,
    #[error("polynomial has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("regularity probe failed in degree {degree}: witness {witness}")]
    RegularityProbeFailed { degree: u32, witness: String },
    #[error("weight {weight} outside truncation bound {bound}")]
    WeightOutOfRange { weight: u32, bound: u32 },
    #[error("truncation bound {0} too small for this operation")]
    TruncationTooSmall(u32),
    #[error("degree {degree} outside complex range [{lo}, {hi}]")]
    DegreeOutOfRange { degree: i64, lo: i64, hi: i64 },
    #[error("no canonical ring map {from} -> {to}")]
    NoCanonicalMap { from: String, to: String },
    #[error("comparison failed at {0}")]
    ComparisonFailed(String),
    #[error("weight {weight} requires cosimplicial cap >= {needed}, have {have}")]
    WeightRequiresHigherCosimplicialCap { weight: u32, needed: u32, have: u32 },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("invalid job: {0}")]
    ParseError(String),
    #[error("linear system has no solution over the coefficient ring")]
    NoSolution,
}

pub type Result<T> = std::result::Result<T, Error>;
