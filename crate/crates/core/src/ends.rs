//! End specifications: horoball and geodesic half-space regions, their
//! exact translates under group elements, and collections of declared ends.
//!
//! The basepoint convention is fixed once: the origin lies outside every
//! declared end region. Half-space regions are the inside of a Euclidean
//! disk orthogonal to the sphere at infinity, which never contains the
//! origin; horoballs must have Euclidean diameter below 1.

use crate::error::EndsError;
use crate::geometry::{BoundaryPoint, Isometry};
use crate::group::{apply_word_h, word_boundary_data, GroupSpec, Word};
use crate::measure::AtomLocation;

/// An open region of the ball usable as an end: a horoball tangent at a
/// boundary point, or the half-space bounded by a geodesic hyperplane
/// (inside of an orthogonal disk).
#[derive(Debug, Clone)]
pub enum Region {
    Horoball {
        base: BoundaryPoint,
        /// Euclidean diameter, in (0, 1).
        diameter: f64,
    },
    Halfspace {
        /// Center of the orthogonal circle/sphere; `|center|^2 = 1 + radius^2`.
        center: Vec<f64>,
        radius: f64,
    },
}

impl Region {
    pub fn horoball(base: BoundaryPoint, diameter: f64) -> Result<Self, EndsError> {
        if !(diameter > 0.0 && diameter < 1.0) {
            return Err(EndsError::InvalidSpec(format!(
                "horoball diameter {diameter} not in (0, 1)"
            )));
        }
        Ok(Region::Horoball { base, diameter })
    }

    /// The half-space spanning the boundary arc between two endpoints (the
    /// side of the geodesic not containing the origin).
    ///
    /// The center is `(xi + eta)/(1 + xi . eta)` and the radius comes from
    /// `rho^2 = (1 - xi . eta)/(1 + xi . eta)` with `1 - xi . eta`
    /// evaluated as `|xi - eta|^2 / 2`: no cancellation even for endpoint
    /// pairs a fraction of an ulp apart, so deep group translates of a
    /// half-space stay exact.
    pub fn halfspace_through(xi: &BoundaryPoint, eta: &BoundaryPoint) -> Result<Self, EndsError> {
        let diff_sq: f64 = xi
            .coords()
            .iter()
            .zip(eta.coords().iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let one_minus_dot = diff_sq / 2.0;
        let one_plus_dot = 2.0 - one_minus_dot;
        if one_plus_dot < 1e-12 || one_minus_dot == 0.0 {
            // Antipodal endpoints span a diameter; equal endpoints span
            // nothing.
            return Err(EndsError::DegenerateHalfspace);
        }
        let center: Vec<f64> = xi
            .coords()
            .iter()
            .zip(eta.coords().iter())
            .map(|(a, b)| (a + b) / one_plus_dot)
            .collect();
        Ok(Region::Halfspace { center, radius: (one_minus_dot / one_plus_dot).sqrt() })
    }

    pub fn halfspace(center: Vec<f64>, radius: f64) -> Result<Self, EndsError> {
        let norm_sq: f64 = center.iter().map(|v| v * v).sum();
        if (norm_sq - 1.0 - radius * radius).abs() > 1e-9 * norm_sq.max(1.0) {
            return Err(EndsError::InvalidSpec(
                "halfspace circle is not orthogonal to the sphere".into(),
            ));
        }
        Ok(Region::Halfspace { center, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Horoball { base, .. } => base.dim(),
            Region::Halfspace { center, .. } => center.len(),
        }
    }

    /// Euclidean circle data (center, radius) of the bounding sphere.
    pub fn euclid_circle(&self) -> (Vec<f64>, f64) {
        match self {
            Region::Horoball { base, diameter } => {
                let r = diameter / 2.0;
                let c = base.coords().iter().map(|v| v * (1.0 - r)).collect();
                (c, r)
            }
            Region::Halfspace { center, radius } => (center.clone(), *radius),
        }
    }

    /// Open-region membership by coordinates.
    pub fn contains_coords(&self, coords: &[f64]) -> bool {
        let (c, r) = self.euclid_circle();
        let d2: f64 = coords.iter().zip(c.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
        d2 < r * r
    }

    /// Closed-region membership within `tol` (boundary atoms sit exactly on
    /// the rim of their horoball).
    pub fn contains_closure(&self, coords: &[f64], tol: f64) -> bool {
        let (c, r) = self.euclid_circle();
        let d2: f64 = coords.iter().zip(c.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
        d2.sqrt() <= r + tol
    }

    pub fn contains(&self, loc: &AtomLocation) -> bool {
        self.contains_coords(loc.ball_coords())
    }

    /// Signed hyperbolic distance from an interior location to the region
    /// boundary: positive inside the region. Uses the location's exact gap.
    ///
    /// Horoball: the Busemann difference `ln(gap/|x-base|^2) - ln((2-h)/h)`.
    /// Half-space: `asinh((rho^2 - |x-c|^2) / (rho * gap))`.
    pub fn signed_boundary_dist(&self, loc: &AtomLocation) -> f64 {
        let gap = match loc {
            AtomLocation::Interior { h, .. } => h.ball_gap(),
            AtomLocation::Boundary { .. } => 0.0,
        };
        self.signed_dist_coords(loc.ball_coords(), gap)
    }

    /// Signed distance from raw coordinates with an externally supplied
    /// exact gap (callers on a parametrized ray know `1 - |x|^2` without
    /// cancellation).
    pub fn signed_dist_coords(&self, coords: &[f64], gap: f64) -> f64 {
        match self {
            Region::Horoball { base, diameter } => {
                let d2: f64 = coords
                    .iter()
                    .zip(base.coords().iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if gap == 0.0 {
                    return if d2.sqrt() <= 1e-12 { f64::INFINITY } else { f64::NEG_INFINITY };
                }
                (gap / d2).ln() - ((2.0 - diameter) / diameter).ln()
            }
            Region::Halfspace { center, radius } => {
                let d2: f64 = coords
                    .iter()
                    .zip(center.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                let num = radius * radius - d2;
                if gap == 0.0 {
                    return if num > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
                }
                (num / (radius * gap)).asinh()
            }
        }
    }

    /// Exact image of the region under a group element given as a word,
    /// evaluated letterwise so deep translates stay accurate.
    pub fn translate_word(
        &self,
        letter_isos: &[Isometry],
        word: &Word,
    ) -> Result<Region, EndsError> {
        match self {
            Region::Horoball { base, diameter } => {
                let (base2, factor) = word_boundary_data(letter_isos, word, base)?;
                // Horoball level transforms by the boundary derivative:
                // beta' = beta - ln|w'(base)| with beta = ln((2-h)/h).
                let level = ((2.0 - diameter) / diameter).ln() - factor.ln();
                let d2 = 2.0 / (level.exp() + 1.0);
                if !(d2 > 0.0 && d2 < 1.0) {
                    return Err(EndsError::InvalidSpec(format!(
                        "translated horoball diameter {d2} leaves (0, 1)"
                    )));
                }
                Ok(Region::Horoball { base: base2, diameter: d2 })
            }
            Region::Halfspace { .. } => {
                let dim = self.dim();
                let pts = self.rim_points();
                let mut imgs = Vec::with_capacity(pts.len());
                for p in pts {
                    let (img, _) = word_boundary_data(letter_isos, word, &p)?;
                    imgs.push(img);
                }
                if dim == 2 {
                    Region::halfspace_through(&imgs[0], &imgs[1])
                } else {
                    let center = solve_orthocenter(&imgs)?;
                    let norm_sq: f64 = center.iter().map(|v| v * v).sum();
                    if norm_sq <= 1.0 {
                        return Err(EndsError::DegenerateHalfspace);
                    }
                    Ok(Region::Halfspace { center, radius: (norm_sq - 1.0).sqrt() })
                }
            }
        }
    }

    /// Points on the intersection of the bounding sphere with the sphere at
    /// infinity (2 for a circle in dimension 2, 3 for a sphere in
    /// dimension 3). Every such point `x` satisfies `x . center = 1`.
    fn rim_points(&self) -> Vec<BoundaryPoint> {
        let Region::Halfspace { center, radius } = self else {
            unreachable!("rim points only for halfspaces");
        };
        let dim = center.len();
        let norm_sq: f64 = center.iter().map(|v| v * v).sum();
        let norm = norm_sq.sqrt();
        let foot: Vec<f64> = center.iter().map(|v| v / norm_sq).collect();
        let s = radius / norm;
        // Orthonormal vectors perpendicular to center.
        let u = perp_unit(center);
        if dim == 2 {
            let mk = |sign: f64| {
                let c: Vec<f64> = foot.iter().zip(u.iter()).map(|(f, uu)| f + sign * s * uu).collect();
                BoundaryPoint::new(&c).expect("rim point is unit")
            };
            vec![mk(1.0), mk(-1.0)]
        } else {
            let v = cross3(center, &u);
            let vn: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let v: Vec<f64> = v.iter().map(|x| x / vn).collect();
            let mk = |t: f64| {
                let c: Vec<f64> = foot
                    .iter()
                    .enumerate()
                    .map(|(i, f)| f + s * (t.cos() * u[i] + t.sin() * v[i]))
                    .collect();
                BoundaryPoint::new(&c).expect("rim point is unit")
            };
            vec![mk(0.0), mk(2.0 * std::f64::consts::FRAC_PI_3 * 2.0), mk(2.0 * std::f64::consts::FRAC_PI_3)]
        }
    }
}

fn perp_unit(v: &[f64]) -> Vec<f64> {
    let dim = v.len();
    if dim == 2 {
        let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
        vec![-v[1] / n, v[0] / n]
    } else {
        // Any vector not parallel to v, orthogonalized.
        let probe = if v[0].abs() <= v[1].abs() && v[0].abs() <= v[2].abs() {
            [1.0, 0.0, 0.0]
        } else if v[1].abs() <= v[2].abs() {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        let dot: f64 = v.iter().zip(probe.iter()).map(|(a, b)| a * b).sum();
        let nsq: f64 = v.iter().map(|x| x * x).sum();
        let raw: Vec<f64> = probe.iter().zip(v.iter()).map(|(p, vv)| p - dot * vv / nsq).collect();
        let n: f64 = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        raw.iter().map(|x| x / n).collect()
    }
}

fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Solves `center . x_k = 1` for the orthosphere center through three
/// mapped rim points (dimension 3). The solve is centered at the rim mean
/// so the right-hand side is built from pairwise differences, which keeps
/// the dominant cancellation out of the system.
fn solve_orthocenter(pts: &[BoundaryPoint]) -> Result<Vec<f64>, EndsError> {
    let mean: Vec<f64> = (0..3)
        .map(|k| pts.iter().map(|p| p.coords()[k]).sum::<f64>() / 3.0)
        .collect();
    // A (mean + delta) = 1  =>  A delta = rhs with
    // rhs_i = 1 - xi_i . mean = sum_j |xi_i - xi_j|^2 / 6.
    let mut m = [[0.0f64; 4]; 3];
    for (i, p) in pts.iter().enumerate().take(3) {
        let c = p.coords();
        m[i][..3].copy_from_slice(c);
        let mut rhs = 0.0;
        for q in pts.iter() {
            let d2: f64 = c
                .iter()
                .zip(q.coords().iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            rhs += d2;
        }
        m[i][3] = rhs / 6.0;
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col].abs() < 1e-13 {
            return Err(EndsError::DegenerateHalfspace);
        }
        m.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Ok((0..3).map(|i| mean[i] + m[i][3] / m[i][i]).collect())
}

/// User assertions carried by an end declaration.
#[derive(Debug, Clone, Default)]
pub struct EndFlags {
    pub bounded: bool,
    pub expected_type: Option<String>,
}

/// Discriminant echoed in files and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndKind {
    Horoball,
    Halfspace,
}

/// One declared end: a region together with generator words of its
/// stabilizer and user assertions.
#[derive(Debug, Clone)]
pub struct EndSpec {
    pub name: String,
    pub region: Region,
    pub stabilizer: Vec<Word>,
    pub flags: EndFlags,
}

impl EndSpec {
    pub fn kind(&self) -> EndKind {
        match self.region {
            Region::Horoball { .. } => EndKind::Horoball,
            Region::Halfspace { .. } => EndKind::Halfspace,
        }
    }

    /// Validates the region invariants against a group: the origin lies
    /// outside, and every stabilizer word maps the region onto itself
    /// (exactly, via translated region data, and on sample points).
    pub fn validate(&self, spec: &GroupSpec) -> Result<(), EndsError> {
        if self.region.dim() != spec.dim {
            return Err(EndsError::InvalidSpec("end dimension mismatch".into()));
        }
        if self.region.contains_coords(&vec![0.0; spec.dim]) {
            return Err(EndsError::OriginInsideEnd);
        }
        let letter_isos = spec.letter_isometries();
        for w in &self.stabilizer {
            let translated = self.region.translate_word(&letter_isos, w)?;
            let (c1, r1) = self.region.euclid_circle();
            let (c2, r2) = translated.euclid_circle();
            let mut defect = (r1 - r2).abs();
            for (a, b) in c1.iter().zip(c2.iter()) {
                defect = defect.max((a - b).abs());
            }
            if defect > 1e-9 {
                return Err(EndsError::StabilizerMismatch { defect });
            }
            // Sample check: interior probes stay inside.
            let map = spec.model_map();
            for p in self.sample_points(8) {
                let h = map.to_half(&p);
                let img = apply_word_h(&letter_isos, w, &h);
                let img_ball = map.to_ball(&img);
                if !self.region.contains_closure(img_ball.coords(), 1e-9) {
                    return Err(EndsError::StabilizerMismatch { defect: 1.0 });
                }
            }
        }
        Ok(())
    }

    /// Deterministic interior probe points of the region.
    fn sample_points(&self, n: usize) -> Vec<crate::geometry::BallPoint> {
        let (c, r) = self.region.euclid_circle();
        let dim = self.region.dim();
        let mut out = Vec::new();
        for i in 0..n {
            // Points on a shrinking segment from the circle center toward
            // the deepest interior point, kept strictly inside the ball.
            let f = 0.15 + 0.7 * (i as f64) / (n as f64);
            let coords: Vec<f64> = c
                .iter()
                .map(|v| v * (1.0 - f * r / c.iter().map(|x| x * x).sum::<f64>().sqrt()))
                .collect();
            let norm: f64 = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1.0 - 1e-9 {
                if let Ok(p) = crate::geometry::BallPoint::new(&coords) {
                    if self.region.contains_coords(p.coords()) {
                        out.push(p);
                    }
                }
            }
            let _ = dim;
        }
        out
    }
}

/// A declared collection of ends, with pairwise-disjoint regions, plus
/// optional "ordinary" half-spaces whose boundary arcs avoid the limit set
/// (used by the boundary-point classifier).
#[derive(Debug, Clone)]
pub struct EndCollection {
    pub ends: Vec<EndSpec>,
    /// User assertion that the collection is complete.
    pub complete: bool,
    pub ordinary: Vec<Region>,
}

impl EndCollection {
    pub fn new(ends: Vec<EndSpec>, complete: bool, ordinary: Vec<Region>) -> Result<Self, EndsError> {
        let c = Self { ends, complete, ordinary };
        c.check_disjoint()?;
        Ok(c)
    }

    /// Pairwise disjointness of the declared regions: a Euclidean circle
    /// separation fast path, then a sampled rim check within 1e-9.
    pub fn check_disjoint(&self) -> Result<(), EndsError> {
        for i in 0..self.ends.len() {
            for j in (i + 1)..self.ends.len() {
                let (ci, ri) = self.ends[i].region.euclid_circle();
                let (cj, rj) = self.ends[j].region.euclid_circle();
                let d: f64 = ci
                    .iter()
                    .zip(cj.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if d >= ri + rj - 1e-12 {
                    continue;
                }
                // Circles meet: sample one region's rim inside the ball and
                // test membership in the other.
                let mut overlap = false;
                for k in 0..512 {
                    let t = k as f64 / 512.0 * std::f64::consts::TAU;
                    let p: Vec<f64> = match ci.len() {
                        2 => vec![ci[0] + ri * t.cos(), ci[1] + ri * t.sin()],
                        _ => vec![ci[0] + ri * t.cos(), ci[1] + ri * t.sin(), ci[2]],
                    };
                    let norm: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm < 1.0 && self.ends[j].region.contains_closure(&p, -1e-9) {
                        overlap = true;
                        break;
                    }
                }
                if overlap {
                    return Err(EndsError::EndsOverlap(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self, spec: &GroupSpec) -> Result<(), EndsError> {
        self.check_disjoint()?;
        for e in &self.ends {
            e.validate(spec)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BallPoint, ModelMap};

    #[test]
    fn halfspace_through_endpoints_is_orthogonal() {
        let xi = BoundaryPoint::new(&[1.0, 0.0]).unwrap();
        let eta = BoundaryPoint::new(&[0.0, 1.0]).unwrap();
        let r = Region::halfspace_through(&xi, &eta).unwrap();
        let (c, rho) = r.euclid_circle();
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12);
        assert!((rho - 1.0).abs() < 1e-12);
        // Contains the arc midpoint, not the origin.
        let mid = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
        assert!(r.contains_closure(&mid, 1e-9));
        assert!(!r.contains_coords(&[0.0, 0.0]));
    }

    #[test]
    fn horoball_signed_distance() {
        let base = BoundaryPoint::new(&[1.0, 0.0]).unwrap();
        let region = Region::horoball(base, 0.5).unwrap();
        let map = ModelMap::new(2);
        // Deepest point of the horoball on the axis: (1 - h) e_1 is on the
        // rim, so points beyond are inside.
        let inside = BallPoint::new(&[0.8, 0.0]).unwrap();
        let outside = BallPoint::new(&[0.2, 0.0]).unwrap();
        let loc_in = AtomLocation::interior(inside, map.to_half(&inside));
        let loc_out = AtomLocation::interior(outside, map.to_half(&outside));
        assert!(region.signed_boundary_dist(&loc_in) > 0.0);
        assert!(region.signed_boundary_dist(&loc_out) < 0.0);
        assert!(region.contains(&loc_in));
        assert!(!region.contains(&loc_out));

        // On the rim the signed distance vanishes.
        let rim = BallPoint::new(&[0.5, 0.0]).unwrap();
        let loc_rim = AtomLocation::interior(rim, map.to_half(&rim));
        assert!(region.signed_boundary_dist(&loc_rim).abs() < 1e-12);
    }

    #[test]
    fn halfspace_signed_distance_matches_closed_form() {
        // Geodesic between +e1 and +e2; point on the perpendicular from the
        // origin: distance from origin to the geodesic is asinh(1).
        let xi = BoundaryPoint::new(&[1.0, 0.0]).unwrap();
        let eta = BoundaryPoint::new(&[0.0, 1.0]).unwrap();
        let region = Region::halfspace_through(&xi, &eta).unwrap();
        let map = ModelMap::new(2);
        let origin = BallPoint::origin(2);
        let loc = AtomLocation::interior(origin, map.to_half(&origin));
        let d = region.signed_boundary_dist(&loc);
        assert!((d + 1f64.asinh()).abs() < 1e-12, "{d}");
    }

    #[test]
    fn horoball_translate_by_its_parabolic_is_exact() {
        use num_complex::Complex64;
        let spec = GroupSpec::new(
            "par",
            2,
            crate::group::Presentation::Free,
            vec![(
                "p".into(),
                Isometry::horizontal_translation(2, Complex64::new(2.0, 0.0)).unwrap(),
            )],
            None,
        )
        .unwrap();
        // The parabolic fixes -e_2; a horoball there is invariant.
        let base = BoundaryPoint::new(&[0.0, -1.0]).unwrap();
        let region = Region::horoball(base, 0.4).unwrap();
        let li = spec.letter_isometries();
        let w = Word::letter(0, false);
        let t = region.translate_word(&li, &w).unwrap();
        let (c1, r1) = region.euclid_circle();
        let (c2, r2) = t.euclid_circle();
        assert!((r1 - r2).abs() < 1e-12);
        assert!(c1.iter().zip(c2.iter()).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn halfspace_translate_preserves_arc() {
        let spec = GroupSpec::new(
            "lox",
            2,
            crate::group::Presentation::Free,
            vec![("g".into(), Isometry::axis_loxodromic(2, 1.0))],
            None,
        )
        .unwrap();
        let xi = BoundaryPoint::new(&[0.6, 0.8]).unwrap();
        let eta = BoundaryPoint::new(&[0.6, -0.8]).unwrap();
        let region = Region::halfspace_through(&xi, &eta).unwrap();
        let li = spec.letter_isometries();
        let w = Word::letter(0, false);
        let t = region.translate_word(&li, &w).unwrap();
        // Rim endpoints map to rim endpoints of the image.
        let g = &spec.generators[0];
        for p in [xi, eta] {
            let img = g.apply_boundary(&p);
            let (c, r) = t.euclid_circle();
            let d: f64 = img
                .coords()
                .iter()
                .zip(c.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!((d - r).abs() < 1e-10);
        }
        // Interior witness maps inside.
        let map = spec.model_map();
        let witness = BallPoint::new(&[0.9, 0.0]).unwrap();
        assert!(region.contains_coords(witness.coords()));
        let img = map.to_ball(&g.apply_h(&map.to_half(&witness)));
        assert!(t.contains_coords(img.coords()));
    }

    #[test]
    fn overlapping_ends_rejected() {
        let base1 = BoundaryPoint::new(&[1.0, 0.0]).unwrap();
        let base2 = BoundaryPoint::new(&[0.995, 0.0999]).unwrap();
        let e1 = EndSpec {
            name: "h1".into(),
            region: Region::horoball(base1, 0.6).unwrap(),
            stabilizer: vec![],
            flags: EndFlags::default(),
        };
        let e2 = EndSpec {
            name: "h2".into(),
            region: Region::horoball(base2, 0.6).unwrap(),
            stabilizer: vec![],
            flags: EndFlags::default(),
        };
        let err = EndCollection::new(vec![e1, e2], false, vec![]).unwrap_err();
        assert!(matches!(err, EndsError::EndsOverlap(0, 1)));
    }

    #[test]
    fn disjoint_ends_accepted() {
        let e1 = EndSpec {
            name: "h1".into(),
            region: Region::horoball(BoundaryPoint::new(&[1.0, 0.0]).unwrap(), 0.3).unwrap(),
            stabilizer: vec![],
            flags: EndFlags::default(),
        };
        let e2 = EndSpec {
            name: "h2".into(),
            region: Region::horoball(BoundaryPoint::new(&[-1.0, 0.0]).unwrap(), 0.3).unwrap(),
            stabilizer: vec![],
            flags: EndFlags::default(),
        };
        assert!(EndCollection::new(vec![e1, e2], false, vec![]).is_ok());
    }
}
