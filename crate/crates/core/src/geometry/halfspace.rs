use num_complex::Complex64;

use super::point::{BallPoint, BoundaryPoint};

/// A point of the upper half-space model: horizontal coordinate `z` (real
/// for dimension 2) and height `t > 0`.
///
/// The half-space is where orbit arithmetic lives: applying a Mobius matrix
/// rescales the height by a positive factor, so quantities like `1 - |x|^2`
/// of the ball image can be recovered without catastrophic cancellation no
/// matter how deep the orbit point is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    pub z: Complex64,
    pub t: f64,
}

impl HPoint {
    pub fn base() -> Self {
        // sigma(0) in half-space coordinates.
        Self { z: Complex64::new(0.0, 0.0), t: 1.0 }
    }

    /// Hyperbolic distance to another half-space point,
    /// `cosh d = 1 + (|z1-z2|^2 + (t1-t2)^2) / (2 t1 t2)`.
    pub fn dist(&self, other: &HPoint) -> f64 {
        let dz = (self.z - other.z).norm_sqr();
        let dt = self.t - other.t;
        let arg = 1.0 + (dz + dt * dt) / (2.0 * self.t * other.t);
        arg.max(1.0).acosh()
    }

    /// Distance to the image of the ball origin.
    pub fn dist_origin(&self) -> f64 {
        self.dist(&HPoint::base())
    }

    /// `1 - |x|^2` of the ball image, computed as `4 t / |u + e_n|^2`.
    /// All terms are positive, so the relative accuracy is that of `t`
    /// itself even when the ball image hugs the sphere.
    pub fn ball_gap(&self) -> f64 {
        4.0 * self.t / self.plus_en_norm_sq()
    }

    fn plus_en_norm_sq(&self) -> f64 {
        let tp = self.t + 1.0;
        self.z.norm_sqr() + tp * tp
    }
}

/// A boundary point of the half-space: a horizontal complex coordinate, or
/// `None` for the point at infinity (the ball point `-e_n`).
pub type HBoundary = Option<Complex64>;

/// The fixed conjugation between the half-space and the ball: inversion in
/// the sphere of radius sqrt(2) centered at `-e_n`. It is an involution, so
/// one closed form serves both directions.
#[derive(Debug, Clone, Copy)]
pub struct ModelMap {
    dim: u8,
}

impl ModelMap {
    pub fn new(dim: usize) -> Self {
        debug_assert!(dim == 2 || dim == 3);
        Self { dim: dim as u8 }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    fn sigma(&self, x: [f64; 3]) -> [f64; 3] {
        let n = self.dim as usize;
        let mut u = x;
        u[n - 1] += 1.0;
        let norm_sq: f64 = u[..n].iter().map(|v| v * v).sum();
        let s = 2.0 / norm_sq;
        let mut out = [0.0; 3];
        for i in 0..n {
            out[i] = u[i] * s;
        }
        out[n - 1] -= 1.0;
        out
    }

    /// Ball interior to half-space.
    pub fn to_half(&self, x: &BallPoint) -> HPoint {
        let n = self.dim as usize;
        let mut c = [0.0; 3];
        c[..n].copy_from_slice(x.coords());
        let u = self.sigma(c);
        if n == 2 {
            HPoint { z: Complex64::new(u[0], 0.0), t: u[1] }
        } else {
            HPoint { z: Complex64::new(u[0], u[1]), t: u[2] }
        }
    }

    /// Half-space interior to ball.
    pub fn to_ball(&self, h: &HPoint) -> BallPoint {
        let n = self.dim as usize;
        let v = if n == 2 {
            [h.z.re, h.t, 0.0]
        } else {
            [h.z.re, h.z.im, h.t]
        };
        let u = self.sigma(v);
        BallPoint::from_array(u, self.dim)
    }

    /// Sphere at infinity to the boundary plane; `-e_n` maps to infinity.
    pub fn to_half_boundary(&self, xi: &BoundaryPoint) -> HBoundary {
        let n = self.dim as usize;
        let c = xi.coords();
        let mut u = [0.0; 3];
        u[..n].copy_from_slice(c);
        u[n - 1] += 1.0;
        let norm_sq: f64 = u[..n].iter().map(|v| v * v).sum();
        if norm_sq == 0.0 {
            return None;
        }
        let s = 2.0 / norm_sq;
        if n == 2 {
            Some(Complex64::new(u[0] * s, 0.0))
        } else {
            Some(Complex64::new(u[0] * s, u[1] * s))
        }
    }

    /// Boundary plane (or infinity) to the sphere at infinity.
    pub fn to_ball_boundary(&self, w: &HBoundary) -> BoundaryPoint {
        let n = self.dim as usize;
        match w {
            None => {
                let mut c = [0.0; 3];
                c[n - 1] = -1.0;
                BoundaryPoint::renormalized(c, self.dim)
            }
            Some(z) => {
                let v = if n == 2 { [z.re, 0.0, 0.0] } else { [z.re, z.im, 0.0] };
                let u = self.sigma(v);
                BoundaryPoint::renormalized(u, self.dim)
            }
        }
    }

    /// Conformal factor of the conjugation at a ball point (interior or
    /// boundary): `|sigma'(x)| = 2 / |x + e_n|^2`.
    pub fn factor_at_ball(&self, coords: &[f64]) -> f64 {
        let n = self.dim as usize;
        let mut u = [0.0; 3];
        u[..n].copy_from_slice(coords);
        u[n - 1] += 1.0;
        let norm_sq: f64 = u[..n].iter().map(|v| v * v).sum();
        2.0 / norm_sq
    }

    /// Conformal factor of the conjugation at a finite half-space boundary
    /// point: `2 / (|z|^2 + 1)`.
    pub fn factor_at_half_boundary(&self, z: Complex64) -> f64 {
        2.0 / (z.norm_sqr() + 1.0)
    }
}
