//! Station runs toward the boundary: normalized orbit measures along a
//! geodesic ray, with test-cap masses and bounded-Lipschitz discrepancy
//! diagnostics between consecutive stations.
//!
//! The weak limit itself is not constructed; the run reports Cauchy-ness
//! evidence (cap masses stabilizing, discrepancies shrinking) and leaves
//! the limit as the object the estimates point at.

use serde::Serialize;

use crate::error::MeasureError;
use crate::exact::ExactSum;
use crate::geometry::BoundaryPoint;
use crate::group::{orbit, GroupSpec, OrbitParams};
use crate::measure::{cap_mass_projected, orbit_measure, AtomicMeasure, SphericalCap};

/// An upper bound on the bounded-Lipschitz distance between two
/// probability measures.
///
/// For measures on the circle this is the exact 1-Wasserstein distance in
/// the arc-length metric (computed by the cyclic cumulative-median rule),
/// which dominates the bounded-Lipschitz distance in the chordal metric.
/// In dimension 3 a feasible transport plan built along a canonical sweep
/// order gives the bound. Both are capped at 2, the diameter bound.
pub fn bl_discrepancy_upper(a: &AtomicMeasure, b: &AtomicMeasure) -> f64 {
    let bound = if a.dim() == 2 {
        wasserstein_circle(&angular_atoms(a), &angular_atoms(b))
    } else {
        transport_upper_3d(a, b)
    };
    bound.min(2.0)
}

fn angular_atoms(m: &AtomicMeasure) -> Vec<(f64, f64)> {
    let total = m.total_mass();
    m.atoms()
        .iter()
        .filter_map(|a| {
            a.location.direction().map(|d| {
                (d.coords()[1].atan2(d.coords()[0]), a.mass / total)
            })
        })
        .collect()
}

/// Exact 1-Wasserstein distance between probability measures on the circle
/// with the arc-length metric: `min_c integral |F_mu - F_nu - c|` over the
/// circle, attained at a weighted median of the cumulative difference.
pub fn wasserstein_circle(mu: &[(f64, f64)], nu: &[(f64, f64)]) -> f64 {
    use std::f64::consts::TAU;
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(mu.len() + nu.len());
    for &(t, m) in mu {
        events.push((normalize_angle(t), m));
    }
    for &(t, m) in nu {
        events.push((normalize_angle(t), -m));
    }
    if events.is_empty() {
        return 0.0;
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Cumulative difference on each arc between consecutive support points.
    let n = events.len();
    let mut levels: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut cum = 0.0;
    for i in 0..n {
        cum += events[i].1;
        let next = if i + 1 < n { events[i + 1].0 } else { events[0].0 + TAU };
        let width = next - events[i].0;
        if width > 0.0 {
            levels.push((cum, width));
        }
    }
    // Weighted median of the levels.
    let mut sorted = levels.clone();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total_w: f64 = sorted.iter().map(|l| l.1).sum();
    let mut acc = 0.0;
    let mut median = sorted.last().map(|l| l.0).unwrap_or(0.0);
    for (lvl, w) in &sorted {
        acc += w;
        if acc >= total_w / 2.0 {
            median = *lvl;
            break;
        }
    }
    levels.iter().map(|(lvl, w)| (lvl - median).abs() * w).sum()
}

fn normalize_angle(t: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut x = (t + PI).rem_euclid(TAU) - PI;
    if x == PI {
        x = -PI;
    }
    x
}

/// Cost of a feasible transport plan between two probability measures on
/// the sphere, built by sweeping both supports in a fixed lexicographic
/// order and matching mass greedily; a valid upper bound for W1 in the
/// chordal metric.
fn transport_upper_3d(a: &AtomicMeasure, b: &AtomicMeasure) -> f64 {
    let norm_atoms = |m: &AtomicMeasure| {
        let total = m.total_mass();
        let mut v: Vec<(Vec<f64>, f64)> = m
            .atoms()
            .iter()
            .filter_map(|at| {
                at.location
                    .direction()
                    .map(|d| (d.coords().to_vec(), at.mass / total))
            })
            .collect();
        v.sort_by(|x, y| {
            x.0.iter()
                .zip(y.0.iter())
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        v
    };
    let mut left = norm_atoms(a);
    let mut right = norm_atoms(b);
    let mut i = 0;
    let mut j = 0;
    let mut cost = 0.0;
    while i < left.len() && j < right.len() {
        let move_mass = left[i].1.min(right[j].1);
        let d: f64 = left[i]
            .0
            .iter()
            .zip(right[j].0.iter())
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt();
        cost += move_mass * d;
        left[i].1 -= move_mass;
        right[j].1 -= move_mass;
        if left[i].1 <= 0.0 {
            i += 1;
        }
        if right[j].1 <= 0.0 {
            j += 1;
        }
    }
    cost
}

/// Diagnostics of one station.
#[derive(Debug, Clone, Serialize)]
pub struct StationDiagnostics {
    pub radius: f64,
    pub basepoint_dist: f64,
    pub atom_count: usize,
    /// Mass captured by each test cap (projected membership).
    pub cap_masses: Vec<f64>,
    /// Mass captured by the union of the test caps.
    pub union_cap_mass: f64,
    /// Bounded-Lipschitz upper bound against the previous station.
    pub bl_vs_previous: Option<f64>,
}

/// A full station run: the measures plus their diagnostics.
pub struct WeakLimitRun {
    pub stations: Vec<(StationDiagnostics, AtomicMeasure)>,
    pub caps: Vec<SphericalCap>,
}

#[derive(Debug, Clone, Copy)]
pub struct WeakLimitParams {
    pub orbit: OrbitParams,
}

impl Default for WeakLimitParams {
    fn default() -> Self {
        Self { orbit: OrbitParams::default() }
    }
}

/// Runs normalized orbit measures from basepoints `radius * ray` for each
/// station radius, recording test-cap masses and pairwise discrepancies.
/// Stations must increase strictly toward the boundary and stay below
/// `1 - 1e-9`.
pub fn weak_limit_run(
    spec: &GroupSpec,
    ray: &BoundaryPoint,
    stations: &[f64],
    alpha: f64,
    depth: usize,
    caps: Vec<SphericalCap>,
    params: &WeakLimitParams,
) -> Result<WeakLimitRun, MeasureError> {
    if stations.is_empty() {
        return Err(MeasureError::InvalidMeasure("no stations".into()));
    }
    for w in stations.windows(2) {
        if w[1] <= w[0] {
            return Err(MeasureError::InvalidMeasure(
                "stations must increase strictly toward the boundary".into(),
            ));
        }
    }
    let last = *stations.last().unwrap();
    if !(0.0..=1.0 - 1e-9).contains(&last) {
        return Err(MeasureError::Geometry(crate::error::GeomError::BoundaryProximity {
            norm: last,
        }));
    }

    let mut out = Vec::with_capacity(stations.len());
    let mut previous: Option<AtomicMeasure> = None;
    for &radius in stations {
        let basepoint = ray.scaled(radius).map_err(MeasureError::Geometry)?;
        let table = orbit(spec, &basepoint, depth, &params.orbit)?;
        let m = orbit_measure(&table, alpha, true)?;
        let cap_masses: Vec<f64> = caps.iter().map(|c| cap_mass_projected(&m, c)).collect();
        let union_cap_mass = union_cap_mass(&m, &caps);
        let bl = previous.as_ref().map(|p| bl_discrepancy_upper(p, &m));
        let diag = StationDiagnostics {
            radius,
            basepoint_dist: table.entries[0].dist,
            atom_count: m.len(),
            cap_masses,
            union_cap_mass,
            bl_vs_previous: bl,
        };
        previous = Some(m.clone());
        out.push((diag, m));
    }
    Ok(WeakLimitRun { stations: out, caps })
}

/// Mass of atoms whose direction lies in at least one cap.
pub fn union_cap_mass(m: &AtomicMeasure, caps: &[SphericalCap]) -> f64 {
    if m.dim() == 2 {
        // Merge the caps into angular intervals once, then binary-search.
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        for c in caps {
            let theta = c.axis.coords()[1].atan2(c.axis.coords()[0]);
            if c.angle >= std::f64::consts::PI {
                intervals.push((-std::f64::consts::PI, std::f64::consts::PI));
                continue;
            }
            let (lo, hi) = (theta - c.angle, theta + c.angle);
            let (lo, hi) = (normalize_angle(lo), normalize_angle(hi));
            if lo <= hi {
                intervals.push((lo, hi));
            } else {
                intervals.push((-std::f64::consts::PI, hi));
                intervals.push((lo, std::f64::consts::PI));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for iv in intervals {
            match merged.last_mut() {
                Some(last) if iv.0 <= last.1 => last.1 = last.1.max(iv.1),
                _ => merged.push(iv),
            }
        }
        let mut acc = ExactSum::new();
        for a in m.atoms() {
            if let Some(d) = a.location.direction() {
                let t = d.coords()[1].atan2(d.coords()[0]);
                let k = merged.partition_point(|iv| iv.0 <= t);
                if k > 0 && t <= merged[k - 1].1 {
                    acc.add(a.mass);
                }
            }
        }
        acc.value()
    } else {
        m.atoms()
            .iter()
            .filter(|a| match a.location.direction() {
                Some(d) => caps.iter().any(|c| c.contains_direction(&d)),
                None => false,
            })
            .map(|a| a.mass)
            .collect::<ExactSum>()
            .value()
    }
}

/// Builds test caps centered at the heaviest atoms of a reference measure
/// (ties broken by canonical atom order).
pub fn caps_at_heaviest_atoms(reference: &AtomicMeasure, count: usize, angle: f64) -> Vec<SphericalCap> {
    let mut order: Vec<usize> = (0..reference.len()).collect();
    order.sort_by(|&i, &j| {
        reference.atoms()[j]
            .mass
            .total_cmp(&reference.atoms()[i].mass)
            .then(i.cmp(&j))
    });
    order
        .into_iter()
        .take(count)
        .filter_map(|i| reference.atoms()[i].location.direction().map(|axis| SphericalCap { axis, angle }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cusped_fuchsian, CuspedParams};
    use crate::measure::{Atom, AtomLocation, Provenance};

    fn point_measure(angles: &[(f64, f64)]) -> AtomicMeasure {
        let atoms = angles
            .iter()
            .map(|&(t, m)| Atom {
                location: AtomLocation::Boundary {
                    point: BoundaryPoint::new(&[t.cos(), t.sin()]).unwrap(),
                },
                mass: m,
            })
            .collect();
        AtomicMeasure::new(1.0, atoms, Provenance::default()).unwrap()
    }

    #[test]
    fn wasserstein_point_masses() {
        // Two unit point masses at angular distance s: W1 = s.
        for s in [0.1, 0.5, 1.5] {
            let a = point_measure(&[(0.0, 1.0)]);
            let b = point_measure(&[(s, 1.0)]);
            let d = bl_discrepancy_upper(&a, &b);
            assert!((d - s).abs() < 1e-12, "s={s} d={d}");
        }
    }

    #[test]
    fn wasserstein_wraps_around() {
        // Points at +- (pi - 0.1): the short way around is 0.2.
        let a = point_measure(&[(std::f64::consts::PI - 0.1, 1.0)]);
        let b = point_measure(&[(-(std::f64::consts::PI - 0.1), 1.0)]);
        let d = bl_discrepancy_upper(&a, &b);
        assert!((d - 0.2).abs() < 1e-12, "d={d}");
    }

    #[test]
    fn wasserstein_split_mass() {
        // Half the mass moves by 0.4, half stays: W1 = 0.2.
        let a = point_measure(&[(0.0, 1.0)]);
        let b = point_measure(&[(0.0, 0.5), (0.4, 0.5)]);
        let d = bl_discrepancy_upper(&a, &b);
        assert!((d - 0.2).abs() < 1e-12, "d={d}");
    }

    #[test]
    fn identical_measures_have_zero_discrepancy() {
        let a = point_measure(&[(0.3, 0.25), (1.0, 0.75)]);
        assert_eq!(bl_discrepancy_upper(&a, &a), 0.0);
    }

    #[test]
    fn single_station_equals_orbit_measure() {
        let fx = cusped_fuchsian(CuspedParams::default());
        let run = weak_limit_run(
            &fx.spec,
            &fx.cusp,
            &[0.9],
            0.9,
            5,
            vec![SphericalCap { axis: fx.cusp, angle: 0.1 }],
            &WeakLimitParams::default(),
        )
        .unwrap();
        assert_eq!(run.stations.len(), 1);
        let (diag, m) = &run.stations[0];
        assert!((m.total_mass() - 1.0).abs() <= 1e-12);
        assert!(diag.bl_vs_previous.is_none());

        let basepoint = fx.cusp.scaled(0.9).unwrap();
        let table = orbit(&fx.spec, &basepoint, 5, &OrbitParams::default()).unwrap();
        let direct = orbit_measure(&table, 0.9, true).unwrap();
        assert_eq!(direct.len(), m.len());
        for (x, y) in direct.atoms().iter().zip(m.atoms().iter()) {
            assert_eq!(x.mass.to_bits(), y.mass.to_bits());
        }
    }

    #[test]
    fn stations_must_increase() {
        let fx = cusped_fuchsian(CuspedParams::default());
        assert!(weak_limit_run(
            &fx.spec,
            &fx.cusp,
            &[0.9, 0.5],
            0.9,
            3,
            vec![],
            &WeakLimitParams::default()
        )
        .is_err());
        assert!(weak_limit_run(
            &fx.spec,
            &fx.cusp,
            &[0.9, 1.0 - 1e-12],
            0.9,
            3,
            vec![],
            &WeakLimitParams::default()
        )
        .is_err());
    }

    #[test]
    fn union_cap_mass_bounds_individual_caps() {
        let fx = cusped_fuchsian(CuspedParams::default());
        let basepoint = fx.cusp.scaled(0.99).unwrap();
        let table = orbit(&fx.spec, &basepoint, 6, &OrbitParams::default()).unwrap();
        let m = orbit_measure(&table, 0.9, true).unwrap();
        let caps = vec![
            SphericalCap { axis: fx.cusp, angle: 0.2 },
            SphericalCap { axis: BoundaryPoint::new(&[0.0, 1.0]).unwrap(), angle: 0.2 },
        ];
        let union = union_cap_mass(&m, &caps);
        let each: Vec<f64> = caps.iter().map(|c| cap_mass_projected(&m, c)).collect();
        assert!(union <= each.iter().sum::<f64>() + 1e-12);
        assert!(union + 1e-12 >= each.iter().cloned().fold(0.0, f64::max));
        assert!(union <= 1.0 + 1e-12);
    }
}
