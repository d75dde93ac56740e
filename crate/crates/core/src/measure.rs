//! Atomic conformal measures on orbits: construction, image measures,
//! conformality checking, restriction and cap masses.
//!
//! An orbit measure puts mass `(1 - |w|^2)^alpha` at each orbit point `w`.
//! Because `|g'(x)| = (1 - |gx|^2)/(1 - |x|^2)` at interior points, the
//! conformal transformation rule holds atom by atom as an algebraic
//! identity; the residual of that identity, measured across independently
//! computed composition paths, is the central correctness probe of the
//! whole laboratory.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::MeasureError;
use crate::exact::ExactSum;
use crate::geometry::{BallPoint, BoundaryPoint, HPoint, Isometry, ModelMap};
use crate::group::OrbitTable;

/// Tolerance under which two atom locations are considered the same point.
pub const MERGE_TOL: f64 = 1e-10;

/// Tolerance for identifying one atom across two computation paths
/// (conformality checks, image comparisons). Hyperbolic for interior
/// atoms: orbit points of the discrete fixtures stay several units apart,
/// while the coordinate noise of two paths to the same point corresponds
/// to a hyperbolic offset of about `e^depth * 1e-15`, so 1e-6 cleanly
/// separates the two regimes up to depth ~20 and deeper atoms are simply
/// reported untestable. Boundary atoms keep the merge-scale tolerance
/// (their orbits genuinely cluster, and combinatorial identification is
/// available where it matters).
pub const MATCH_TOL: f64 = 1e-6;

/// Where an atom sits: in the open ball (carrying its exact half-space
/// representation) or on the sphere at infinity.
#[derive(Debug, Clone, Copy)]
pub enum AtomLocation {
    Interior { point: BallPoint, h: HPoint },
    Boundary { point: BoundaryPoint },
}

impl AtomLocation {
    pub fn interior(point: BallPoint, h: HPoint) -> Self {
        AtomLocation::Interior { point, h }
    }

    pub fn interior_from_ball(point: BallPoint, map: &ModelMap) -> Self {
        AtomLocation::Interior { point, h: map.to_half(&point) }
    }

    pub fn boundary(point: BoundaryPoint) -> Self {
        AtomLocation::Boundary { point }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, AtomLocation::Boundary { .. })
    }

    pub fn dim(&self) -> usize {
        match self {
            AtomLocation::Interior { point, .. } => point.dim(),
            AtomLocation::Boundary { point } => point.dim(),
        }
    }

    pub fn ball_coords(&self) -> &[f64] {
        match self {
            AtomLocation::Interior { point, .. } => point.coords(),
            AtomLocation::Boundary { point } => point.coords(),
        }
    }

    /// Radial direction; `None` only for an interior atom at the origin.
    pub fn direction(&self) -> Option<BoundaryPoint> {
        match self {
            AtomLocation::Interior { point, .. } => point.direction(),
            AtomLocation::Boundary { point } => Some(*point),
        }
    }

    /// Hyperbolic distance from the origin; `None` for boundary atoms.
    pub fn dist_origin(&self) -> Option<f64> {
        match self {
            AtomLocation::Interior { h, .. } => Some(h.dist_origin()),
            AtomLocation::Boundary { .. } => None,
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            AtomLocation::Interior { .. } => 0,
            AtomLocation::Boundary { .. } => 1,
        }
    }

    /// Location identity within `tol`. Boundary atoms compare by Euclidean
    /// distance on the sphere. Interior atoms compare by hyperbolic
    /// distance in the half-space representation (`d <= 2 tol`, matching
    /// the Euclidean tolerance at the origin): deep orbit points whose ball
    /// coordinates have saturated the `f64` grid remain distinguishable
    /// through their heights, so genuinely distinct atoms of a discrete
    /// orbit never alias while true coincidences still merge.
    pub fn same_point(&self, other: &AtomLocation, tol: f64) -> bool {
        match (self, other) {
            (AtomLocation::Boundary { point: a }, AtomLocation::Boundary { point: b }) => {
                a.euclid_dist(b) <= tol
            }
            (AtomLocation::Interior { h: ha, .. }, AtomLocation::Interior { h: hb, .. }) => {
                // sinh^2(d/2) = (|dz|^2 + dt^2) / (4 t1 t2) <= sinh^2(tol).
                let num = (ha.z - hb.z).norm_sqr() + (ha.t - hb.t) * (ha.t - hb.t);
                num <= 4.0 * ha.t * hb.t * tol.sinh().powi(2)
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Atom {
    pub location: AtomLocation,
    pub mass: f64,
}

/// Construction metadata carried by every measure.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub group: String,
    pub truncation: Option<usize>,
    pub tag: String,
}

/// A finite list of weighted atoms on the closed ball.
#[derive(Debug, Clone)]
pub struct AtomicMeasure {
    pub alpha: f64,
    atoms: Vec<Atom>,
    pub provenance: Provenance,
}

fn canonical_cmp(a: &Atom, b: &Atom) -> std::cmp::Ordering {
    a.location
        .kind_rank()
        .cmp(&b.location.kind_rank())
        .then_with(|| {
            let pa = a.location.ball_coords();
            let pb = b.location.ball_coords();
            pa.iter()
                .zip(pb.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
}

impl AtomicMeasure {
    /// Builds a measure: positive masses, atoms within [`MERGE_TOL`] merged
    /// by summing mass onto the first occurrence, canonical location order.
    pub fn new(alpha: f64, atoms: Vec<Atom>, provenance: Provenance) -> Result<Self, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::EmptyMeasure);
        }
        for a in &atoms {
            if !(a.mass > 0.0) || !a.mass.is_finite() {
                return Err(MeasureError::InvalidMeasure(format!("atom mass {}", a.mass)));
            }
        }
        let merged = merge_atoms(atoms, MERGE_TOL);
        let mut m = Self { alpha, atoms: merged, provenance };
        m.atoms.sort_by(canonical_cmp);
        Ok(m)
    }

    /// Builds a measure from atoms already known to sit at pairwise
    /// distinct locations (orbits of free groups, coset translates):
    /// validation and canonical ordering without the merge scan.
    pub fn new_distinct(alpha: f64, atoms: Vec<Atom>, provenance: Provenance) -> Result<Self, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::EmptyMeasure);
        }
        for a in &atoms {
            if !(a.mass > 0.0) || !a.mass.is_finite() {
                return Err(MeasureError::InvalidMeasure(format!("atom mass {}", a.mass)));
            }
        }
        let mut m = Self { alpha, atoms, provenance };
        m.atoms.sort_by(canonical_cmp);
        Ok(m)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].location.dim()
    }

    /// Exactly accumulated total mass.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).collect::<ExactSum>().value()
    }

    /// Rescales all masses so the total is 1.
    pub fn normalized(mut self) -> Self {
        let total = self.total_mass();
        for a in &mut self.atoms {
            a.mass /= total;
        }
        self
    }

    /// Keeps exactly the atoms whose location satisfies the predicate.
    pub fn restrict<F: Fn(&AtomLocation) -> bool>(&self, pred: F) -> Result<AtomicMeasure, MeasureError> {
        let kept: Vec<Atom> = self.atoms.iter().copied().filter(|a| pred(&a.location)).collect();
        if kept.is_empty() {
            return Err(MeasureError::EmptyMeasure);
        }
        Ok(AtomicMeasure { alpha: self.alpha, atoms: kept, provenance: self.provenance.clone() })
    }

    pub fn index(&self) -> AtomIndex {
        AtomIndex::build(self)
    }
}

fn merge_atoms(atoms: Vec<Atom>, tol: f64) -> Vec<Atom> {
    let cell = tol.max(1e-15) * 2.0;
    let mut grid: HashMap<(u8, [i64; 3]), Vec<usize>> = HashMap::new();
    let mut kept: Vec<Atom> = Vec::new();
    'outer: for a in atoms {
        let mut key = [0i64; 3];
        for (i, c) in a.location.ball_coords().iter().enumerate() {
            key[i] = (c / cell).floor() as i64;
        }
        let kind = a.location.kind_rank();
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                for dz in -1..=1i64 {
                    let probe = (kind, [key[0] + dx, key[1] + dy, key[2] + dz]);
                    if let Some(cands) = grid.get(&probe) {
                        for &i in cands {
                            if kept[i].location.same_point(&a.location, tol) {
                                kept[i].mass += a.mass;
                                continue 'outer;
                            }
                        }
                    }
                }
            }
        }
        grid.entry((kind, key)).or_default().push(kept.len());
        kept.push(a);
    }
    kept
}

/// Grid lookup from a location to the atom index holding that point.
pub struct AtomIndex {
    cell: f64,
    grid: HashMap<(u8, [i64; 3]), Vec<usize>>,
}

impl AtomIndex {
    fn build(m: &AtomicMeasure) -> Self {
        let cell = MERGE_TOL * 2.0;
        let mut grid: HashMap<(u8, [i64; 3]), Vec<usize>> = HashMap::new();
        for (i, a) in m.atoms.iter().enumerate() {
            let mut key = [0i64; 3];
            for (j, c) in a.location.ball_coords().iter().enumerate() {
                key[j] = (c / cell).floor() as i64;
            }
            grid.entry((a.location.kind_rank(), key)).or_default().push(i);
        }
        Self { cell, grid }
    }

    pub fn find(&self, m: &AtomicMeasure, loc: &AtomLocation, tol: f64) -> Option<usize> {
        let mut key = [0i64; 3];
        for (j, c) in loc.ball_coords().iter().enumerate() {
            key[j] = (c / self.cell).floor() as i64;
        }
        let kind = loc.kind_rank();
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                for dz in -1..=1i64 {
                    let probe = (kind, [key[0] + dx, key[1] + dy, key[2] + dz]);
                    if let Some(cands) = self.grid.get(&probe) {
                        for &i in cands {
                            if m.atoms[i].location.same_point(loc, tol) {
                                return Some(i);
                            }
                        }
                    }
                }
            }
        }
        None
    }
}

/// The atomic measure on an orbit table: mass `gap^alpha` at each entry,
/// optionally normalized to total mass 1.
pub fn orbit_measure(table: &OrbitTable, alpha: f64, normalize: bool) -> Result<AtomicMeasure, MeasureError> {
    if !(alpha > 0.0) {
        return Err(MeasureError::InvalidMeasure(format!("alpha {alpha} must be positive")));
    }
    if table.entries.is_empty() {
        return Err(MeasureError::EmptyMeasure);
    }
    let atoms: Vec<Atom> = table
        .entries
        .iter()
        .map(|e| Atom {
            location: AtomLocation::Interior { point: e.image, h: e.image_h },
            mass: e.gap.powf(alpha),
        })
        .collect();
    let provenance = Provenance {
        group: table.group_name.clone(),
        truncation: Some(table.depth),
        tag: format!("orbit-measure(normalize={normalize})"),
    };
    // Free tables hold pairwise distinct elements (and, for a torsion-free
    // discrete action, pairwise distinct images); unknown presentations go
    // through the merging constructor so surviving coincidences collapse.
    let m = match table.presentation {
        crate::group::Presentation::Free => AtomicMeasure::new_distinct(alpha, atoms, provenance)?,
        crate::group::Presentation::Unknown => AtomicMeasure::new(alpha, atoms, provenance)?,
    };
    Ok(if normalize { m.normalized() } else { m })
}

/// The image measure: atom `(x, p)` goes to `(g x, p |g'(x)|^alpha)`.
pub fn image_measure(m: &AtomicMeasure, g: &Isometry) -> Result<AtomicMeasure, MeasureError> {
    let mut atoms = Vec::with_capacity(m.len());
    let map = g.model_map();
    for a in m.atoms() {
        match &a.location {
            AtomLocation::Interior { h, .. } => {
                let h2 = g.apply_h(h);
                let factor = h2.ball_gap() / h.ball_gap();
                atoms.push(Atom {
                    location: AtomLocation::Interior { point: map.to_ball(&h2), h: h2 },
                    mass: a.mass * factor.powf(m.alpha),
                });
            }
            AtomLocation::Boundary { point } => {
                let factor = g.conformal_factor_boundary(point)?;
                atoms.push(Atom {
                    location: AtomLocation::Boundary { point: g.apply_boundary(point) },
                    mass: a.mass * factor.powf(m.alpha),
                });
            }
        }
    }
    let mut provenance = m.provenance.clone();
    provenance.tag = format!("{}+image", provenance.tag);
    AtomicMeasure::new(m.alpha, atoms, provenance)
}

/// Outcome of checking `m(g x) = |g'(x)|^alpha m(x)` over the atoms of `m`.
#[derive(Debug, Clone, Serialize)]
pub struct ConformalityReport {
    pub max_residual: f64,
    pub tested_atoms: usize,
    pub untestable_atoms: usize,
    /// Mass-weighted fraction of atoms whose image leaves the support (for
    /// truncated orbit measures: words pushed past the truncation).
    pub untestable_mass_fraction: f64,
    pub untestable_count_fraction: f64,
}

pub fn conformality_residual(m: &AtomicMeasure, g: &Isometry) -> ConformalityReport {
    let index = m.index();
    let map = g.model_map();
    let mut max_residual: f64 = 0.0;
    let mut tested = 0usize;
    let mut untestable = 0usize;
    let mut untestable_mass = ExactSum::new();
    let total = m.total_mass();

    for a in m.atoms() {
        let (image_loc, factor) = match &a.location {
            AtomLocation::Interior { h, .. } => {
                let h2 = g.apply_h(h);
                let factor = h2.ball_gap() / h.ball_gap();
                (AtomLocation::Interior { point: map.to_ball(&h2), h: h2 }, factor)
            }
            AtomLocation::Boundary { point } => match g.conformal_factor_boundary(point) {
                Ok(factor) => (AtomLocation::Boundary { point: g.apply_boundary(point) }, factor),
                Err(_) => {
                    untestable += 1;
                    untestable_mass.add(a.mass);
                    continue;
                }
            },
        };
        let tol = if image_loc.is_boundary() { MERGE_TOL } else { MATCH_TOL };
        match index.find(m, &image_loc, tol) {
            Some(i) => {
                let expected = factor.powf(m.alpha) * a.mass;
                let got = m.atoms()[i].mass;
                let residual = (got - expected).abs() / got;
                max_residual = max_residual.max(residual);
                tested += 1;
            }
            None => {
                untestable += 1;
                untestable_mass.add(a.mass);
            }
        }
    }

    ConformalityReport {
        max_residual,
        tested_atoms: tested,
        untestable_atoms: untestable,
        untestable_mass_fraction: untestable_mass.value() / total,
        untestable_count_fraction: untestable as f64 / m.len() as f64,
    }
}

/// A spherical cap on the sphere at infinity.
#[derive(Debug, Clone, Copy)]
pub struct SphericalCap {
    pub axis: BoundaryPoint,
    pub angle: f64,
}

impl SphericalCap {
    pub fn full_sphere(dim: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[0] = 1.0;
        Self { axis: BoundaryPoint::new(&c).unwrap(), angle: std::f64::consts::PI }
    }

    pub fn contains_direction(&self, dir: &BoundaryPoint) -> bool {
        self.axis.angle_to(dir) <= self.angle
    }
}

/// Mass of boundary atoms inside the cap. The cap is a subset of the
/// sphere, so interior atoms never contribute; the full-sphere cap mass is
/// the total boundary mass.
pub fn cap_mass(m: &AtomicMeasure, cap: &SphericalCap) -> f64 {
    m.atoms()
        .iter()
        .filter(|a| matches!(&a.location, AtomLocation::Boundary { point } if cap.contains_direction(point)))
        .map(|a| a.mass)
        .collect::<ExactSum>()
        .value()
}

/// Mass of all atoms whose radial projection lands in the cap: the cone
/// test used for station diagnostics of interior-supported measures. An
/// interior atom at the origin counts only for the full-sphere cap.
pub fn cap_mass_projected(m: &AtomicMeasure, cap: &SphericalCap) -> f64 {
    m.atoms()
        .iter()
        .filter(|a| match a.location.direction() {
            Some(dir) => cap.contains_direction(&dir),
            None => cap.angle >= std::f64::consts::PI,
        })
        .map(|a| a.mass)
        .collect::<ExactSum>()
        .value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Isometry;
    use crate::group::{orbit, GroupSpec, OrbitParams, Presentation};
    use crate::poincare::poincare_partial;

    fn two_gen_spec() -> GroupSpec {
        GroupSpec::new(
            "f2",
            2,
            Presentation::Free,
            vec![
                ("a".into(), Isometry::axis_loxodromic(2, 2.4)),
                ("b".into(), Isometry::vertical_loxodromic(2, 2.1, 0.0)),
            ],
            None,
        )
        .unwrap()
    }

    fn two_gen_measure(depth: usize, alpha: f64, normalize: bool) -> (GroupSpec, AtomicMeasure) {
        let spec = two_gen_spec();
        let table = orbit(&spec, &BallPoint::origin(2), depth, &OrbitParams::default()).unwrap();
        let m = orbit_measure(&table, alpha, normalize).unwrap();
        (spec, m)
    }

    #[test]
    fn single_atom_table() {
        let spec = two_gen_spec();
        let table = orbit(&spec, &BallPoint::origin(2), 0, &OrbitParams::default()).unwrap();
        let m = orbit_measure(&table, 0.7, false).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.total_mass(), 1.0); // (1 - 0)^alpha
        let mn = orbit_measure(&table, 0.7, true).unwrap();
        assert!((mn.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalized_total_mass_is_one() {
        let (_, m) = two_gen_measure(6, 0.8, true);
        assert!((m.total_mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn conformality_on_generators() {
        let (spec, m) = two_gen_measure(6, 0.8, true);
        for g in &spec.generators {
            let report = conformality_residual(&m, g);
            assert!(report.tested_atoms > 0);
            assert!(report.max_residual <= 1e-9, "residual {}", report.max_residual);
            assert!(report.untestable_mass_fraction < 0.3);
        }
    }

    #[test]
    fn corrupted_mass_detected() {
        let (spec, m) = two_gen_measure(5, 0.8, true);
        let mut atoms: Vec<Atom> = m.atoms().to_vec();
        // Double one deep atom's mass.
        let idx = atoms.len() / 2;
        atoms[idx].mass *= 2.0;
        let bad = AtomicMeasure::new(m.alpha, atoms, Provenance::default()).unwrap();
        let report = conformality_residual(&bad, &spec.generators[0]);
        assert!(report.max_residual >= 0.5, "residual {}", report.max_residual);
    }

    #[test]
    fn image_measure_identity_and_member() {
        let (spec, m) = two_gen_measure(5, 0.9, true);
        let id = Isometry::identity(2);
        let mi = image_measure(&m, &id).unwrap();
        assert_eq!(mi.len(), m.len());
        for (a, b) in m.atoms().iter().zip(mi.atoms().iter()) {
            assert!((a.mass - b.mass).abs() <= 1e-15 * a.mass);
        }

        // For g in the group, the image agrees with m on the common atoms:
        // only level-5 words not beginning with a^-1 get pushed past the
        // truncation.
        let g = &spec.generators[0];
        let mg = image_measure(&m, g).unwrap();
        let index = m.index();
        let mut common = 0;
        for a in mg.atoms() {
            if let Some(i) = index.find(&m, &a.location, MERGE_TOL) {
                let ratio = (a.mass - m.atoms()[i].mass).abs() / m.atoms()[i].mass;
                assert!(ratio <= 1e-10, "ratio {ratio}");
                common += 1;
            }
        }
        let pushed_out = 4 * 81 - 81; // level-5 words minus those starting a^-1
        assert_eq!(common, m.len() - pushed_out);
    }

    #[test]
    fn cocycle_identity() {
        let (spec, m) = two_gen_measure(4, 0.8, true);
        let g1 = spec.generators[0].compose(&spec.generators[1]);
        let g2 = spec.generators[1].invert().compose(&spec.generators[0]);
        let lhs = image_measure(&image_measure(&m, &g2).unwrap(), &g1).unwrap();
        let rhs = image_measure(&m, &g1.compose(&g2)).unwrap();
        assert_eq!(lhs.len(), rhs.len());
        // Match atoms through the index: canonical sorting may order
        // near-ties differently between the two computation paths.
        let rhs_index = rhs.index();
        for a in lhs.atoms() {
            let i = rhs_index.find(&rhs, &a.location, 1e-9).expect("matching atom");
            let b = &rhs.atoms()[i];
            assert!((a.mass - b.mass).abs() <= 1e-10 * a.mass.max(b.mass));
        }
    }

    #[test]
    fn rotation_fixes_origin_atom() {
        let spec = two_gen_spec();
        let table = orbit(&spec, &BallPoint::origin(2), 0, &OrbitParams::default()).unwrap();
        let m = orbit_measure(&table, 1.0, true).unwrap();
        let rot = Isometry::rotation_2d(1.1);
        let report = conformality_residual(&m, &rot);
        assert_eq!(report.tested_atoms, 1);
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn restriction_partition_additivity() {
        let (_, m) = two_gen_measure(6, 0.8, true);
        let left = m.restrict(|loc| loc.ball_coords()[0] < 0.0).unwrap();
        let right = m.restrict(|loc| loc.ball_coords()[0] >= 0.0).unwrap();
        let sum = ExactSum::from_iter([left.total_mass(), right.total_mass()]).value();
        assert!((sum - m.total_mass()).abs() <= 1e-12);
        let all = m.restrict(|_| true).unwrap();
        assert_eq!(all.len(), m.len());
        assert!(m.restrict(|_| false).is_err());
    }

    #[test]
    fn comparability_with_poincare_sum() {
        // Per atom, (1-|w|^2) e^{d} = 4/(1+e^{-d})^2 lies in [1, 4), so the
        // raw orbit mass is within [P_N, 4^alpha P_N].
        let alpha = 0.8;
        let spec = two_gen_spec();
        let table = orbit(&spec, &BallPoint::origin(2), 6, &OrbitParams::default()).unwrap();
        let m = orbit_measure(&table, alpha, false).unwrap();
        for e in &table.entries {
            let ratio = (e.gap * e.dist.exp()).powf(alpha);
            let bound_lo = 1.0 - 1e-12;
            let bound_hi = 4f64.powf(alpha) + 1e-12;
            assert!(ratio >= bound_lo && ratio <= bound_hi, "ratio {ratio}");
        }
        let p = poincare_partial(&table, &BallPoint::origin(2), alpha).partial_sum;
        let w = m.total_mass();
        assert!(w >= p * (1.0 - 1e-12));
        assert!(w <= p * 4f64.powf(alpha) * (1.0 + 1e-12));
    }

    #[test]
    fn cap_masses() {
        let (_, m) = two_gen_measure(5, 0.8, true);
        let full = SphericalCap::full_sphere(2);
        // All atoms are interior: the boundary cap mass is zero while the
        // projected cone mass is everything.
        assert_eq!(cap_mass(&m, &full), 0.0);
        assert!((cap_mass_projected(&m, &full) - m.total_mass()).abs() <= 1e-12);

        let half = SphericalCap {
            axis: BoundaryPoint::new(&[1.0, 0.0]).unwrap(),
            angle: std::f64::consts::FRAC_PI_2,
        };
        let inside = cap_mass_projected(&m, &half);
        assert!(inside > 0.0 && inside < m.total_mass());

        // Monotone under cap inclusion.
        let narrow = SphericalCap { axis: half.axis, angle: 0.3 };
        assert!(cap_mass_projected(&m, &narrow) <= inside);
    }
}
