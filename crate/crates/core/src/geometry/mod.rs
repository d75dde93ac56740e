//! Ball-model geometry: points, the half-space conjugation, isometries.
//!
//! Isometries of hyperbolic 2- and 3-space are represented by 2x2 complex
//! matrices of determinant 1 acting on the upper half-space model (complex
//! fractional-linear maps in dimension 2, the quaternionic rule in dimension
//! 3). A fixed inversion conjugates the half-space to the Poincare ball, so
//! all public operations speak ball coordinates while the arithmetic that
//! has to survive deep orbits (heights, boundary gaps, derivatives) happens
//! in the half-space where it is cancellation free.

mod halfspace;
mod isometry;
mod point;

pub use halfspace::{HBoundary, HPoint, ModelMap};
pub use isometry::{raw_attracting_fixed_point, Isometry, IsometryClass};
pub use point::{dist, dist_polar, BallPoint, BoundaryPoint};

/// Points with Euclidean norm above `1 - BOUNDARY_GUARD` are rejected by
/// coordinate-level operations; beyond this the radial information left in
/// an `f64` vector is pure noise.
pub const BOUNDARY_GUARD: f64 = 1e-14;

/// Construction-time tolerance for determinant normalization and for the
/// dimension-2 realness requirement.
pub const DET_TOL: f64 = 1e-12;

/// Tolerance for action-level identities (distance preservation, inverse
/// round trips, factor multiplicativity).
pub const ACTION_TOL: f64 = 1e-10;

/// A boundary conformal factor is refused when the evaluation point is this
/// close to the pole of the defining formula.
pub const POLE_TOL: f64 = 1e-12;
