use crate::error::GeomError;

use super::BOUNDARY_GUARD;

/// A point of the open unit ball in dimension 2 or 3.
///
/// Coordinates are stored in a fixed-size array; for dimension 2 the third
/// entry is zero. Points are immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallPoint {
    coords: [f64; 3],
    dim: u8,
}

impl BallPoint {
    pub fn new(coords: &[f64]) -> Result<Self, GeomError> {
        let dim = coords.len();
        if dim != 2 && dim != 3 {
            return Err(GeomError::InvalidPoint(format!("dimension {dim}, want 2 or 3")));
        }
        let mut c = [0.0; 3];
        c[..dim].copy_from_slice(coords);
        if !c.iter().all(|v| v.is_finite()) {
            return Err(GeomError::InvalidPoint("non-finite coordinate".into()));
        }
        let p = Self { coords: c, dim: dim as u8 };
        let norm = p.norm();
        if norm >= 1.0 {
            return Err(GeomError::InvalidPoint(format!("|x| = {norm} not interior")));
        }
        Ok(p)
    }

    pub fn origin(dim: usize) -> Self {
        Self { coords: [0.0; 3], dim: dim as u8 }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `1 - |x|^2` straight from coordinates. Near the boundary this loses
    /// relative accuracy; deep orbit machinery tracks gaps through the
    /// half-space model instead.
    pub fn gap(&self) -> f64 {
        1.0 - self.norm_sq()
    }

    /// Euclidean distance.
    pub fn euclid_dist(&self, other: &BallPoint) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Radial direction, or `None` at the origin.
    pub fn direction(&self) -> Option<BoundaryPoint> {
        let n = self.norm();
        if n == 0.0 {
            return None;
        }
        let mut c = self.coords;
        for v in &mut c {
            *v /= n;
        }
        Some(BoundaryPoint::renormalized(c, self.dim))
    }

    pub(crate) fn from_array(coords: [f64; 3], dim: u8) -> Self {
        Self { coords, dim }
    }

    fn guard(&self) -> Result<(), GeomError> {
        let norm = self.norm();
        if norm > 1.0 - BOUNDARY_GUARD {
            Err(GeomError::BoundaryProximity { norm })
        } else {
            Ok(())
        }
    }
}

/// A point of the sphere at infinity, renormalized to unit length at
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    coords: [f64; 3],
    dim: u8,
}

impl BoundaryPoint {
    pub fn new(coords: &[f64]) -> Result<Self, GeomError> {
        let dim = coords.len();
        if dim != 2 && dim != 3 {
            return Err(GeomError::InvalidPoint(format!("dimension {dim}, want 2 or 3")));
        }
        let mut c = [0.0; 3];
        c[..dim].copy_from_slice(coords);
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(GeomError::InvalidPoint("cannot normalize zero or non-finite vector".into()));
        }
        for v in &mut c {
            *v /= norm;
        }
        Ok(Self { coords: c, dim: dim as u8 })
    }

    pub(crate) fn renormalized(mut coords: [f64; 3], dim: u8) -> Self {
        let norm = coords.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut coords {
            *v /= norm;
        }
        Self { coords, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    pub fn euclid_dist(&self, other: &BoundaryPoint) -> f64 {
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Angle between directions, in [0, pi].
    pub fn angle_to(&self, other: &BoundaryPoint) -> f64 {
        let dot: f64 = self
            .coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| a * b)
            .sum();
        dot.clamp(-1.0, 1.0).acos()
    }

    /// The interior point at Euclidean radius `r` in this direction.
    pub fn scaled(&self, r: f64) -> Result<BallPoint, GeomError> {
        if !(0.0..1.0).contains(&r) {
            return Err(GeomError::InvalidPoint(format!("radius {r} not in [0, 1)")));
        }
        let mut c = self.coords;
        for v in &mut c {
            *v *= r;
        }
        Ok(BallPoint::from_array(c, self.dim))
    }
}

/// Hyperbolic distance between interior points,
/// `cosh d = 1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2))`.
pub fn dist(x: &BallPoint, y: &BallPoint) -> Result<f64, GeomError> {
    x.guard()?;
    y.guard()?;
    let dx = x.euclid_dist(y);
    let arg = 1.0 + 2.0 * dx * dx / (x.gap() * y.gap());
    Ok(arg.max(1.0).acosh())
}

/// Hyperbolic distance `d(x, y)` given the angle `psi` between the radial
/// directions of `x` and `y` and their distances `dx = d(0, x)`,
/// `dy = d(0, y)`. The law of cosines is evaluated as
/// `cosh d = cosh(dx - dy) + sinh(dx) sinh(dy) (1 - cos psi)`, a sum of
/// nonnegative terms: the textbook product form cancels catastrophically
/// for deep points at small angles.
pub fn dist_polar(dx: f64, dy: f64, psi: f64) -> f64 {
    let half = (psi / 2.0).sin();
    let c = (dx - dy).cosh() + dx.sinh() * dy.sinh() * (2.0 * half * half);
    c.max(1.0).acosh()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist_zero_iff_equal() {
        let x = BallPoint::new(&[0.3, 0.1]).unwrap();
        assert_eq!(dist(&x, &x).unwrap(), 0.0);
        let y = BallPoint::new(&[0.3, 0.100001]).unwrap();
        assert!(dist(&x, &y).unwrap() > 0.0);
    }

    #[test]
    fn dist_radial_closed_form() {
        // Integral of 2 dt/(1-t^2) from 0 to 1/2 is log 3.
        let o = BallPoint::origin(2);
        let x = BallPoint::new(&[0.5, 0.0]).unwrap();
        assert!((dist(&o, &x).unwrap() - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn boundary_proximity_rejected() {
        let x = BallPoint::from_array([1.0 - 1e-16, 0.0, 0.0], 2);
        let o = BallPoint::origin(2);
        assert!(matches!(dist(&x, &o), Err(GeomError::BoundaryProximity { .. })));
    }

    #[test]
    fn polar_distance_matches_coordinates() {
        let x = BallPoint::new(&[0.4, 0.1]).unwrap();
        let y = BallPoint::new(&[-0.2, 0.5]).unwrap();
        let o = BallPoint::origin(2);
        let dx = dist(&o, &x).unwrap();
        let dy = dist(&o, &y).unwrap();
        let psi = x.direction().unwrap().angle_to(&y.direction().unwrap());
        assert!((dist_polar(dx, dy, psi) - dist(&x, &y).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn boundary_is_renormalized() {
        let b = BoundaryPoint::new(&[3.0, 4.0]).unwrap();
        assert!((b.coords().iter().map(|v| v * v).sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}
