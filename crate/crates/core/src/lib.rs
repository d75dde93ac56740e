//! Numerical laboratory for Kleinian groups acting on the Poincare ball.
//!
//! The crate provides exact Mobius arithmetic for hyperbolic isometries in
//! dimensions 2 and 3, word and orbit enumeration for finitely generated
//! groups, Poincare series diagnostics, atomic conformal measures on orbits,
//! and the shadow/end machinery used to localize and decompose those
//! measures: shadow-lemma constants, escape estimates into thin shells,
//! coset extensions, end decompositions and parabolic orbit measures.
//!
//! Everything is plain `f64` numerics with deterministic, canonically
//! ordered results: enumeration is reproducible across worker counts and
//! series are accumulated with error-free float expansions.




pub mod classify;
pub mod endmeasure;
pub mod ends;
pub mod error;
pub mod exact;
pub mod fixtures;

pub mod geometry;
pub mod io;
pub mod group;

pub mod measure;
pub mod poincare;
pub mod shadow;
pub mod weaklimit;



pub use ends::{EndCollection, EndFlags, EndKind, EndSpec, Region};
pub use error::{AnalysisError, EndsError, GeomError, GroupError, MeasureError};
pub use exact::ExactSum;
pub use geometry::{BallPoint, BoundaryPoint, HPoint, Isometry, ModelMap};
pub use group::{CosetTable, GroupSpec, Letter, OrbitEntry, OrbitTable, Presentation, Word};
pub use measure::{Atom, AtomLocation, AtomicMeasure, SphericalCap};
pub use poincare::{ConvergenceVerdict, ExponentEstimate, SeriesEstimate};
pub use shadow::Shadow;
