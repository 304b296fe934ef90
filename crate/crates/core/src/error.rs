use thiserror::Error;

use crate::space::Witness;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution must be at least 1")]
    ZeroResolution,

    #[error("weight {weight} at node {index} is not strictly positive")]
    NonPositiveWeight { index: usize, weight: f64 },

    #[error("weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands live on different spaces")]
    SpaceMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid delta sequence: {0}")]
    InvalidDeltaSequence(String),

    #[error("no admissible delta' for delta = {delta} (witness node {node})")]
    NoDeltaPrime { delta: f64, node: usize },

    #[error("the algebra over a {kind} space has no unit")]
    UnitNotAvailable { kind: &'static str },

    #[error("operation requires a finite space")]
    NotFinite,

    #[error("operation requires an infinite (non-finite) space; use the exact finite routine")]
    FiniteSpace,

    #[error("condition {condition} fails: {witness}")]
    ConditionFailed { condition: &'static str, witness: Witness },

    #[error("no admissible delta below {epsilon} separates nodes {a} and {b}")]
    DisjointBallsImpossible { epsilon: f64, a: usize, b: usize },

    #[error("map is not measure preserving at node {node}: pushed mass {pushed}, weight {weight}")]
    NotMeasurePreserving { node: usize, pushed: f64, weight: f64 },

    #[error("gauge function has modulus {modulus} at node {index}")]
    NotUnimodular { index: usize, modulus: f64 },

    #[error("mass {mass} lies outside the retained node set")]
    SupportViolation { mass: f64 },

    #[error("factorization needs rank {rank} > {n}")]
    FactorizationOverflow { rank: usize, n: usize },

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
