//! Error types shared across the crate.

use thiserror::Error;

/// Errors from ball-model geometry and isometry arithmetic.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    /// Point too close to the sphere at infinity for reliable arithmetic.
    #[error("boundary-proximity: |x| = {norm} exceeds 1 - 1e-14")]
    BoundaryProximity { norm: f64 },
    /// Boundary evaluation at the pole of the conformal-factor formula.
    #[error("pole: boundary point within {dist:.3e} of the map pole")]
    Pole { dist: f64 },
    /// Point invariants violated (wrong dimension, not interior, zero vector).
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    /// Matrix invariants violated (singular, not real for dim 2, bad dim).
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
}

/// Errors from word, orbit and coset enumeration.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GroupError {
    #[error("budget-exceeded: enumeration would visit {needed} words, cap is {cap}")]
    BudgetExceeded { needed: u64, cap: u64 },
    #[error("heuristic-mode-required: presentation is not free and heuristic mode is disabled")]
    HeuristicRequired,
    #[error("heuristic-cosets-rejected: {0} requires an exact coset table")]
    HeuristicCosetsRejected(String),
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Errors from measure construction and transformation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MeasureError {
    #[error("empty-measure: restriction keeps no atoms")]
    EmptyMeasure,
    #[error("not-fixed: point moves by {dist:.3e} under a stabilizer generator")]
    NotFixed { dist: f64 },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Errors from end specifications and decompositions.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EndsError {
    #[error("ends-overlap: regions of ends {0} and {1} intersect")]
    EndsOverlap(usize, usize),
    #[error("origin inside declared end region")]
    OriginInsideEnd,
    #[error("stabilizer word does not preserve the end region (defect {defect:.3e})")]
    StabilizerMismatch { defect: f64 },
    #[error("degenerate halfspace: image passes through the origin")]
    DegenerateHalfspace,
    #[error("invalid end spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Errors from series estimation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalysisError {
    #[error("insufficient-depth: N(R_max) = {count}, need at least {need}")]
    InsufficientDepth { count: usize, need: usize },
    #[error("hypothesis not established: {0}")]
    HypothesisMissing(String),
}
