use num_complex::Complex64;

use crate::error::GeomError;

use super::halfspace::{HBoundary, HPoint, ModelMap};
use super::point::{BallPoint, BoundaryPoint};
use super::{BOUNDARY_GUARD, DET_TOL, POLE_TOL};

/// Rough isometry type read off the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsometryClass {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic,
}

/// An orientation-preserving isometry of the ball in dimension 2 or 3.
///
/// Stored as a 2x2 complex matrix of determinant 1 acting on the upper
/// half-space (fractional-linear on the boundary plane, the quaternionic
/// rule on interior points), conjugated to the ball by the fixed
/// [`ModelMap`] inversion. For dimension 2 the entries are real. The
/// determinant-1 representative is canonicalized so equal isometries built
/// along different composition paths hash and compare identically: the
/// trace gets nonnegative real part, ties fall through to the imaginary
/// part and then to the first nonzero entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    m: [Complex64; 4],
    minv: [Complex64; 4],
    dim: u8,
}

fn canonical_sign(m: &mut [Complex64; 4]) {
    let tr = m[0] + m[3];
    let flip = if tr.re != 0.0 {
        tr.re < 0.0
    } else if tr.im != 0.0 {
        tr.im < 0.0
    } else {
        let mut flip = false;
        for e in m.iter() {
            if e.re != 0.0 {
                flip = e.re < 0.0;
                break;
            }
            if e.im != 0.0 {
                flip = e.im < 0.0;
                break;
            }
        }
        flip
    };
    if flip {
        for e in m.iter_mut() {
            *e = -*e;
        }
    }
}

fn adjugate(m: &[Complex64; 4]) -> [Complex64; 4] {
    [m[3], -m[1], -m[2], m[0]]
}

fn mat_mul(a: &[Complex64; 4], b: &[Complex64; 4]) -> [Complex64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn normalize_det(m: &mut [Complex64; 4]) -> Result<(), GeomError> {
    let det = m[0] * m[3] - m[1] * m[2];
    let norm = det.norm();
    if !norm.is_finite() || norm < 1e-100 {
        return Err(GeomError::InvalidMatrix(format!("determinant {det} not normalizable")));
    }
    let s = det.sqrt();
    for e in m.iter_mut() {
        *e /= s;
    }
    Ok(())
}

/// Applies a raw matrix to a half-space point. With `z' + t' j` the
/// quaternionic image of `z + t j`:
/// `D = |cz+d|^2 + |c|^2 t^2`, `z' = ((az+b)(cz+d)* + a c* t^2)/D`, `t' = t/D`.
fn apply_mat_h(m: &[Complex64; 4], h: &HPoint) -> HPoint {
    let (a, b, c, d) = (m[0], m[1], m[2], m[3]);
    let zc = c * h.z + d;
    let den = zc.norm_sqr() + c.norm_sqr() * h.t * h.t;
    let num = (a * h.z + b) * zc.conj() + a * c.conj() * (h.t * h.t);
    HPoint { z: num / den, t: h.t / den }
}

fn apply_mat_h_boundary(m: &[Complex64; 4], w: &HBoundary) -> HBoundary {
    let (a, b, c, d) = (m[0], m[1], m[2], m[3]);
    match w {
        None => {
            if c.norm_sqr() == 0.0 {
                None
            } else {
                Some(a / c)
            }
        }
        Some(z) => {
            let den = c * z + d;
            if den.norm_sqr() == 0.0 {
                None
            } else {
                Some((a * z + b) / den)
            }
        }
    }
}

impl Isometry {
    pub fn identity(dim: usize) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let m = [one, zero, zero, one];
        Self { m, minv: m, dim: dim as u8 }
    }

    /// Builds an isometry from matrix entries `[a, b, c, d]`, normalizing
    /// the determinant to 1 and picking the canonical representative.
    /// Dimension 2 requires (projectively) real entries; real matrices of
    /// negative determinant are orientation reversing on the half-plane and
    /// come out imaginary after normalization, so they are rejected here.
    pub fn from_matrix(dim: usize, entries: [Complex64; 4]) -> Result<Self, GeomError> {
        if dim != 2 && dim != 3 {
            return Err(GeomError::InvalidMatrix(format!("dimension {dim}, want 2 or 3")));
        }
        if !entries.iter().all(|e| e.re.is_finite() && e.im.is_finite()) {
            return Err(GeomError::InvalidMatrix("non-finite entry".into()));
        }
        let mut m = entries;
        normalize_det(&mut m)?;
        canonical_sign(&mut m);
        if dim == 2 {
            let scale = m.iter().map(|e| e.norm()).fold(0.0f64, f64::max).max(1.0);
            let imag = m.iter().map(|e| e.im.abs()).fold(0.0f64, f64::max);
            if imag > DET_TOL * scale {
                return Err(GeomError::InvalidMatrix(format!(
                    "dimension-2 matrix has imaginary part {imag:.3e} after normalization"
                )));
            }
            for e in m.iter_mut() {
                e.im = 0.0;
            }
            normalize_det(&mut m)?;
            canonical_sign(&mut m);
        }
        let iso = Self { minv: adjugate(&m), m, dim: dim as u8 };
        iso.check_round_trip()?;
        Ok(iso)
    }

    pub fn from_real(dim: usize, entries: [f64; 4]) -> Result<Self, GeomError> {
        Self::from_matrix(dim, entries.map(|x| Complex64::new(x, 0.0)))
    }

    fn check_round_trip(&self) -> Result<(), GeomError> {
        // Probe invariant: matrix followed by cached inverse is the
        // identity action.
        let probes = [
            HPoint::base(),
            HPoint { z: Complex64::new(0.4, 0.0), t: 0.7 },
            HPoint { z: Complex64::new(-1.3, 0.0), t: 2.1 },
        ];
        for p in probes {
            let q = apply_mat_h(&self.minv, &apply_mat_h(&self.m, &p));
            let defect = (q.z - p.z).norm() + (q.t - p.t).abs();
            if !(defect < 1e-10 * (1.0 + p.t)) {
                return Err(GeomError::InvalidMatrix(format!(
                    "inverse round trip defect {defect:.3e}"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn matrix(&self) -> &[Complex64; 4] {
        &self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0] + self.m[3]
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        debug_assert_eq!(self.dim, other.dim);
        let mut m = mat_mul(&self.m, &other.m);
        // Renormalize the determinant drift while the computed determinant
        // is still meaningful. For matrices of norm R the determinant is
        // only known to R^2 * eps absolutely, so once the product grows
        // past that the raw entries are kept: they remain projectively
        // accurate, and interior actions of long words go through
        // letterwise application instead (see GroupSpec::apply_word_h).
        let det = m[0] * m[3] - m[1] * m[2];
        if det.norm() > 0.25 && det.norm() < 4.0 {
            normalize_det(&mut m).expect("determinant in the safe band");
        }
        canonical_sign(&mut m);
        Isometry { minv: adjugate(&m), m, dim: self.dim }
    }

    pub fn invert(&self) -> Isometry {
        let mut m = self.minv;
        canonical_sign(&mut m);
        Isometry { minv: adjugate(&m), m, dim: self.dim }
    }

    /// Projective distance: max entry difference after Frobenius
    /// normalization and the best sign choice, so it is insensitive to the
    /// scalar drift of long products.
    pub fn projective_dist(&self, other: &Isometry) -> f64 {
        let fa = self.m.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        let fb = other.m.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        let direct = self
            .m
            .iter()
            .zip(other.m.iter())
            .map(|(x, y)| (x / fa - y / fb).norm())
            .fold(0.0f64, f64::max);
        let flipped = self
            .m
            .iter()
            .zip(other.m.iter())
            .map(|(x, y)| (x / fa + y / fb).norm())
            .fold(0.0f64, f64::max);
        direct.min(flipped)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.projective_dist(&Isometry::identity(self.dim())) <= tol
    }

    pub fn model_map(&self) -> ModelMap {
        ModelMap::new(self.dim())
    }

    // ---- actions ----

    pub fn apply_h(&self, h: &HPoint) -> HPoint {
        apply_mat_h(&self.m, h)
    }

    pub fn apply_h_inv(&self, h: &HPoint) -> HPoint {
        apply_mat_h(&self.minv, h)
    }

    pub fn apply_h_boundary(&self, w: &HBoundary) -> HBoundary {
        apply_mat_h_boundary(&self.m, w)
    }

    /// Action on an interior ball point.
    pub fn apply(&self, x: &BallPoint) -> Result<BallPoint, GeomError> {
        let norm = x.norm();
        if norm > 1.0 - BOUNDARY_GUARD {
            return Err(GeomError::BoundaryProximity { norm });
        }
        let map = self.model_map();
        Ok(map.to_ball(&self.apply_h(&map.to_half(x))))
    }

    /// Continuous extension of the action to the sphere at infinity.
    pub fn apply_boundary(&self, xi: &BoundaryPoint) -> BoundaryPoint {
        let map = self.model_map();
        map.to_ball_boundary(&self.apply_h_boundary(&map.to_half_boundary(xi)))
    }

    /// Image of the ball origin, in half-space coordinates.
    pub fn origin_image_h(&self) -> HPoint {
        self.apply_h(&HPoint::base())
    }

    /// `g^{-1}(0)`: the pole datum of the boundary derivative formula.
    pub fn inverse_origin_h(&self) -> HPoint {
        apply_mat_h(&self.minv, &HPoint::base())
    }

    // ---- conformal factors ----

    /// `|g'(x)| = (1 - |gx|^2) / (1 - |x|^2)` at an interior point, evaluated
    /// through half-space gaps so compositions stay multiplicative.
    pub fn conformal_factor_interior(&self, x: &BallPoint) -> Result<f64, GeomError> {
        let norm = x.norm();
        if norm > 1.0 - BOUNDARY_GUARD {
            return Err(GeomError::BoundaryProximity { norm });
        }
        let map = self.model_map();
        let h = map.to_half(x);
        Ok(self.conformal_factor_interior_h(&h))
    }

    /// Interior factor from half-space data; use when the point carries an
    /// exact half-space representation (deep orbit atoms).
    pub fn conformal_factor_interior_h(&self, h: &HPoint) -> f64 {
        self.apply_h(h).ball_gap() / h.ball_gap()
    }

    /// `|g'(xi)|` on the sphere at infinity. Closed form
    /// `(1 - |a|^2)/|xi - a|^2` with `a = g^{-1}(0)`; evaluated through the
    /// half-space chain rule away from the conjugation's special point and
    /// by the closed form there. Rotations about the origin give exactly 1.
    pub fn conformal_factor_boundary(&self, xi: &BoundaryPoint) -> Result<f64, GeomError> {
        let map = self.model_map();
        let ha = self.inverse_origin_h();
        let a_ball = map.to_ball(&ha);
        let mut pole_gap_sq = 0.0;
        for (p, q) in xi.coords().iter().zip(a_ball.coords().iter()) {
            pole_gap_sq += (p - q) * (p - q);
        }
        let pole_dist = pole_gap_sq.sqrt();
        if pole_dist < POLE_TOL {
            return Err(GeomError::Pole { dist: pole_dist });
        }
        let w = map.to_half_boundary(xi);
        if let Some(z) = w {
            let den = self.m[2] * z + self.m[3];
            let den_sq = den.norm_sqr();
            if den_sq > 0.0 {
                let z_img = (self.m[0] * z + self.m[1]) / den;
                let chain = map.factor_at_half_boundary(z_img)
                    * (1.0 / den_sq)
                    * map.factor_at_ball(xi.coords());
                return Ok(chain);
            }
        }
        // xi or its image is the conjugation's special point: fall back to
        // the closed form with the gap of a taken from half-space data.
        Ok(ha.ball_gap() / pole_gap_sq)
    }

    // ---- spectral data ----

    pub fn classify(&self, tol: f64) -> IsometryClass {
        if self.is_identity(tol) {
            return IsometryClass::Identity;
        }
        let tr2 = self.trace() * self.trace();
        if (tr2 - Complex64::new(4.0, 0.0)).norm() <= tol {
            return IsometryClass::Parabolic;
        }
        if tr2.im.abs() <= tol && tr2.re >= 0.0 && tr2.re < 4.0 {
            return IsometryClass::Elliptic;
        }
        IsometryClass::Loxodromic
    }

    /// Boundary fixed points in half-space coordinates, paired with the
    /// magnitude of the derivative there (attracting means < 1). The
    /// derivative of `z -> (az+b)/(cz+d)` is `1/(cz+d)^2`; at infinity the
    /// expansion rate in the inverted chart is `1/|a|^2`.
    pub fn boundary_fixed_points_h(&self) -> Vec<(HBoundary, f64)> {
        let (a, b, c, d) = (self.m[0], self.m[1], self.m[2], self.m[3]);
        let mut out = Vec::new();
        if c.norm_sqr() == 0.0 {
            out.push((None, 1.0 / a.norm_sqr().max(1e-300)));
            if (a - d).norm() > 1e-14 {
                let z = b / (d - a);
                out.push((Some(z), 1.0 / d.norm_sqr().max(1e-300)));
            }
        } else {
            let disc = self.trace() * self.trace() - Complex64::new(4.0, 0.0);
            let sq = disc.sqrt();
            for sign in [1.0, -1.0] {
                let z = (a - d + sq * sign) / (c * 2.0);
                let den = (c * z + d).norm_sqr();
                out.push((Some(z), 1.0 / den.max(1e-300)));
                if sq.norm() < 1e-14 {
                    break;
                }
            }
        }
        out
    }

    /// Attracting boundary fixed point on the sphere, when one exists:
    /// loxodromic elements give the |derivative| < 1 fixed point, parabolic
    /// elements their unique fixed point. Elliptic and identity give none.
    pub fn attracting_fixed_point(&self, tol: f64) -> Option<BoundaryPoint> {
        match self.classify(tol) {
            IsometryClass::Identity | IsometryClass::Elliptic => None,
            IsometryClass::Parabolic => {
                let pts = self.boundary_fixed_points_h();
                let map = self.model_map();
                pts.first().map(|(w, _)| map.to_ball_boundary(w))
            }
            IsometryClass::Loxodromic => {
                let pts = self.boundary_fixed_points_h();
                let map = self.model_map();
                pts.iter()
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .map(|(w, _)| map.to_ball_boundary(w))
            }
        }
    }

    // ---- standard elements ----

    /// Hyperbolic translation by length `len` along the ball axis through
    /// `-e_1` and `+e_1`, moving the origin toward `+e_1` for positive `len`.
    pub fn axis_loxodromic(dim: usize, len: f64) -> Self {
        let s = len / 2.0;
        Self::from_real(dim, [s.cosh(), s.sinh(), s.sinh(), s.cosh()])
            .expect("axis translation matrix is unimodular")
    }

    /// Translation along the vertical half-space axis (the ball axis through
    /// `-e_n`, `+e_n`); screw rotation by `twist` in dimension 3.
    pub fn vertical_loxodromic(dim: usize, len: f64, twist: f64) -> Self {
        let lambda = Complex64::new(len / 2.0, twist / 2.0).exp();
        let zero = Complex64::new(0.0, 0.0);
        Self::from_matrix(dim, [lambda, zero, zero, lambda.inv()])
            .expect("diagonal matrix is unimodular")
    }

    /// Rotation of the disk about the origin by `angle` (dimension 2).
    pub fn rotation_2d(angle: f64) -> Self {
        let h = angle / 2.0;
        Self::from_real(2, [h.cos(), h.sin(), -h.sin(), h.cos()])
            .expect("rotation matrix is unimodular")
    }

    /// Rotation of the 3-ball about the origin: an SU(2) element
    /// `[[alpha, beta], [-conj(beta), conj(alpha)]]` (normalized here).
    pub fn rotation_3d(alpha: Complex64, beta: Complex64) -> Result<Self, GeomError> {
        Self::from_matrix(3, [alpha, beta, -beta.conj(), alpha.conj()])
    }

    /// Parabolic translation `z -> z + shift` of the boundary plane, fixing
    /// the ball point `-e_n`.
    pub fn horizontal_translation(dim: usize, shift: Complex64) -> Result<Self, GeomError> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::from_matrix(dim, [one, shift, zero, one])
    }
}

/// Attracting boundary fixed point of a raw matrix product, tolerant of
/// determinant drift (the decision between the two roots compares
/// `|c z + d|` directly, which is determinant free). Returns `None` for
/// elliptic and identity-like matrices; parabolic matrices give their
/// unique fixed point.
pub fn raw_attracting_fixed_point(m: &[Complex64; 4], dim: usize) -> Option<BoundaryPoint> {
    let (a, b, c, d) = (m[0], m[1], m[2], m[3]);
    let scale = [a, b, c, d].iter().map(|e| e.norm()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return None;
    }
    let map = ModelMap::new(dim);
    if c.norm() <= 1e-13 * scale {
        // Fixes infinity (the ball point -e_n).
        let balance = (a.norm() - d.norm()).abs();
        if balance <= 1e-9 * scale {
            if b.norm() <= 1e-12 * scale {
                // Diagonal unitary: elliptic or identity.
                return None;
            }
            // Translation-like: parabolic at infinity.
            return Some(map.to_ball_boundary(&None));
        }
        if a.norm() > d.norm() {
            return Some(map.to_ball_boundary(&None));
        }
        let z = b / (d - a);
        return finite_root(z, dim, &map);
    }
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr - det * 4.0;
    let sq = disc.sqrt();
    let z1 = (a - d + sq) / (c * 2.0);
    let z2 = (a - d - sq) / (c * 2.0);
    let v1 = (c * z1 + d).norm_sqr();
    let v2 = (c * z2 + d).norm_sqr();
    let root_sep = (z1 - z2).norm() / (1.0 + z1.norm().max(z2.norm()));
    if root_sep <= 1e-8 {
        // Parabolic: double fixed point.
        return finite_root(z1, dim, &map);
    }
    let (hi, lo) = if v1 >= v2 { (v1, v2) } else { (v2, v1) };
    if hi <= lo * (1.0 + 1e-9) {
        // Equal multiplier moduli: elliptic, no attracting endpoint.
        return None;
    }
    finite_root(if v1 > v2 { z1 } else { z2 }, dim, &map)
}

fn finite_root(z: Complex64, dim: usize, map: &ModelMap) -> Option<BoundaryPoint> {
    if dim == 2 && z.im.abs() > 1e-9 * (1.0 + z.norm()) {
        return None;
    }
    let z = if dim == 2 { Complex64::new(z.re, 0.0) } else { z };
    Some(map.to_ball_boundary(&Some(z)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point::dist;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> BallPoint {
        loop {
            let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.95..0.95)).collect();
            if let Ok(p) = BallPoint::new(&c) {
                if p.norm() < 0.95 {
                    return p;
                }
            }
        }
    }

    fn random_isometry(rng: &mut ChaCha8Rng, dim: usize) -> Isometry {
        // Random word in a few standard elements keeps matrices well scaled.
        let mut g = Isometry::identity(dim);
        for _ in 0..rng.gen_range(1..6) {
            let pick: u8 = rng.gen_range(0..3);
            let h = match pick {
                0 => Isometry::axis_loxodromic(dim, rng.gen_range(-1.5..1.5)),
                1 => {
                    if dim == 2 {
                        Isometry::rotation_2d(rng.gen_range(-3.0..3.0))
                    } else {
                        let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        let b = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        if (a.norm_sqr() + b.norm_sqr()) < 1e-3 {
                            Isometry::identity(dim)
                        } else {
                            Isometry::rotation_3d(a, b).unwrap()
                        }
                    }
                }
                _ => Isometry::vertical_loxodromic(dim, rng.gen_range(-1.5..1.5), 0.0),
            };
            g = g.compose(&h);
        }
        g
    }

    #[test]
    fn identity_fixes_points() {
        let id = Isometry::identity(2);
        let x = BallPoint::new(&[0.3, 0.1]).unwrap();
        let y = id.apply(&x).unwrap();
        assert!(x.euclid_dist(&y) < 1e-15);
    }

    #[test]
    fn inverse_round_trip_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2usize, 3] {
            for _ in 0..50 {
                let g = random_isometry(&mut rng, dim);
                let o = BallPoint::origin(dim);
                let img = g.apply(&o).unwrap();
                let back = g.invert().apply(&img).unwrap();
                assert!(back.norm() < 1e-10, "round trip defect {}", back.norm());
            }
        }
    }

    #[test]
    fn distance_preserved_10k_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2usize, 3] {
            for _ in 0..5_000 {
                let g = random_isometry(&mut rng, dim);
                let x = random_point(&mut rng, dim);
                let y = random_point(&mut rng, dim);
                let d0 = dist(&x, &y).unwrap();
                let d1 = dist(&g.apply(&x).unwrap(), &g.apply(&y).unwrap()).unwrap();
                assert!((d0 - d1).abs() < 1e-10, "dim {dim}: {d0} vs {d1}");
            }
        }
    }

    #[test]
    fn action_is_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for dim in [2usize, 3] {
            for _ in 0..200 {
                let g = random_isometry(&mut rng, dim);
                let h = random_isometry(&mut rng, dim);
                let x = random_point(&mut rng, dim);
                let lhs = g.compose(&h).apply(&x).unwrap();
                let rhs = g.apply(&h.apply(&x).unwrap()).unwrap();
                assert!(lhs.euclid_dist(&rhs) < 1e-10);
            }
        }
    }

    #[test]
    fn compose_associative_on_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let a = random_isometry(&mut rng, 3);
            let b = random_isometry(&mut rng, 3);
            let c = random_isometry(&mut rng, 3);
            let left = a.compose(&b).compose(&c);
            let right = a.compose(&b.compose(&c));
            assert!(left.projective_dist(&right) < 1e-12);
        }
    }

    #[test]
    fn factor_interior_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for dim in [2usize, 3] {
            for _ in 0..200 {
                let g = random_isometry(&mut rng, dim);
                let h = random_isometry(&mut rng, dim);
                let x = random_point(&mut rng, dim);
                let hx = h.apply(&x).unwrap();
                let lhs = g.compose(&h).conformal_factor_interior(&x).unwrap();
                let rhs = g.conformal_factor_interior(&hx).unwrap()
                    * h.conformal_factor_interior(&x).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(rhs));
            }
        }
    }

    #[test]
    fn factor_boundary_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for dim in [2usize, 3] {
            for _ in 0..200 {
                let g = random_isometry(&mut rng, dim);
                let h = random_isometry(&mut rng, dim);
                let mut c = vec![0.0; dim];
                let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                c[0] = angle.cos();
                c[1] = angle.sin();
                let xi = BoundaryPoint::new(&c).unwrap();
                let hxi = h.apply_boundary(&xi);
                let lhs = g.compose(&h).conformal_factor_boundary(&xi).unwrap();
                let rhs = g.conformal_factor_boundary(&hxi).unwrap()
                    * h.conformal_factor_boundary(&xi).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(rhs));
            }
        }
    }

    #[test]
    fn rotations_have_unit_boundary_factor() {
        let r2 = Isometry::rotation_2d(0.83);
        let xi = BoundaryPoint::new(&[1.0, 0.0]).unwrap();
        assert!((r2.conformal_factor_boundary(&xi).unwrap() - 1.0).abs() <= 1e-12);
        let r3 = Isometry::rotation_3d(Complex64::new(0.6, 0.3), Complex64::new(-0.2, 0.7)).unwrap();
        for p in [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.8, 0.0]] {
            let xi = BoundaryPoint::new(&p).unwrap();
            assert!((r3.conformal_factor_boundary(&xi).unwrap() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn disk_map_reference_values() {
        // g(w) = (w - 1/2)/(1 - w/2) on the disk: the axis translation with
        // g(0) = (-1/2, 0). Interior factor at 0 is 3/4, boundary factor at
        // +e_1 is 3.
        let g = Isometry::axis_loxodromic(2, -(3f64.ln()));
        let img = g.apply(&BallPoint::origin(2)).unwrap();
        assert!((img.coords()[0] + 0.5).abs() < 1e-12 && img.coords()[1].abs() < 1e-12);
        let f0 = g.conformal_factor_interior(&BallPoint::origin(2)).unwrap();
        assert!((f0 - 0.75).abs() < 1e-12);
        let xi = BoundaryPoint::new(&[1.0, 0.0]).unwrap();
        let fb = g.conformal_factor_boundary(&xi).unwrap();
        assert!((fb - 3.0).abs() < 1e-10);
    }

    #[test]
    fn boundary_factor_matches_radial_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let g = random_isometry(&mut rng, 2);
            let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let xi = BoundaryPoint::new(&[angle.cos(), angle.sin()]).unwrap();
            let fb = g.conformal_factor_boundary(&xi).unwrap();
            let eps = 1e-6;
            let x = xi.scaled(1.0 - eps).unwrap();
            let fi = g.conformal_factor_interior(&x).unwrap();
            assert!((fi - fb).abs() <= 1e-5 * fb, "{fi} vs {fb}");
        }
    }

    #[test]
    fn radial_limit_of_action_converges() {
        let g = Isometry::axis_loxodromic(2, 0.9).compose(&Isometry::rotation_2d(0.4));
        let xi = BoundaryPoint::new(&[0.6, 0.8]).unwrap();
        let target = g.apply_boundary(&xi);
        let mut last = f64::INFINITY;
        for eps in [1e-3, 1e-5, 1e-7] {
            let x = xi.scaled(1.0 - eps).unwrap();
            let img = g.apply(&x).unwrap();
            let mut diff = 0.0;
            for (p, q) in img.coords().iter().zip(target.coords().iter()) {
                diff += (p - q) * (p - q);
            }
            let diff = diff.sqrt();
            assert!(diff < last + 1e-12);
            last = diff;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn parabolic_fixes_its_point() {
        let p = Isometry::horizontal_translation(2, Complex64::new(3.0, 0.0)).unwrap();
        // Fixed point is the ball point -e_2 (infinity of the half-plane).
        let v = BoundaryPoint::new(&[0.0, -1.0]).unwrap();
        let img = p.apply_boundary(&v);
        assert!(v.euclid_dist(&img) < 1e-10);
        assert_eq!(p.classify(1e-9), IsometryClass::Parabolic);
    }

    #[test]
    fn attracting_fixed_points() {
        let g = Isometry::axis_loxodromic(2, 2.0);
        let fp = g.attracting_fixed_point(1e-9).unwrap();
        assert!(fp.euclid_dist(&BoundaryPoint::new(&[1.0, 0.0]).unwrap()) < 1e-10);
        let gi = g.invert();
        let fp2 = gi.attracting_fixed_point(1e-9).unwrap();
        assert!(fp2.euclid_dist(&BoundaryPoint::new(&[-1.0, 0.0]).unwrap()) < 1e-10);
        assert!(Isometry::rotation_2d(1.0).attracting_fixed_point(1e-9).is_none());
    }

    #[test]
    fn vertical_loxodromic_translation_length() {
        for dim in [2usize, 3] {
            let len = 1.7;
            let g = Isometry::vertical_loxodromic(dim, len, if dim == 3 { 0.8 } else { 0.0 });
            let o = BallPoint::origin(dim);
            let img = g.apply(&o).unwrap();
            let d = dist(&o, &img).unwrap();
            assert!((d - len).abs() < 1e-12, "dim {dim}: moved {d}");
        }
    }

    #[test]
    fn dim2_rejects_non_real() {
        let bad = Isometry::from_matrix(
            2,
            [
                Complex64::new(1.0, 0.3),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, -0.3),
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn canonical_representative_is_stable() {
        let g = Isometry::from_real(2, [-2.0, -0.5, -0.3, -0.6]).unwrap();
        // Trace of the input is negative; the canonical form flips it.
        assert!(g.trace().re > 0.0);
        let h = Isometry::from_real(2, [2.0, 0.5, 0.3, 0.6]).unwrap();
        assert!(g.projective_dist(&h) < 1e-12);
        assert_eq!(g.matrix()[0].re.to_bits(), h.matrix()[0].re.to_bits());
    }

    #[test]
    fn boundary_action_at_special_point() {
        // sigma's special point -e_n is handled through the infinity chart.
        let g = Isometry::axis_loxodromic(3, 1.2);
        let xi = BoundaryPoint::new(&[0.0, 0.0, -1.0]).unwrap();
        let img = g.apply_boundary(&xi);
        let f = g.conformal_factor_boundary(&xi).unwrap();
        assert!(f > 0.0 && f.is_finite());
        // Consistency with a nearby regular point.
        let near = BoundaryPoint::new(&[1e-7, 0.0, -1.0]).unwrap();
        let f_near = g.conformal_factor_boundary(&near).unwrap();
        assert!((f - f_near).abs() < 1e-5 * f);
        let img_near = g.apply_boundary(&near);
        assert!(img.euclid_dist(&img_near) < 1e-5);
    }
}
