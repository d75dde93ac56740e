//! Conformal measures attached to ends: extension over coset
//! representatives, decomposition of a measure across a collection of ends,
//! and atomic measures on parabolic orbits.

use serde::Serialize;

use crate::ends::{EndCollection, Region};
use crate::error::{EndsError, GroupError, MeasureError};
use crate::exact::ExactSum;
use crate::geometry::BoundaryPoint;
use crate::geometry::Isometry;
use crate::group::{apply_word_h, word_boundary_data, CosetTable, GroupSpec, Word};
use crate::measure::{Atom, AtomLocation, AtomicMeasure, Provenance};

/// Least-squares geometric fit of per-length shell masses.
#[derive(Debug, Clone, Serialize)]
pub struct TailFit {
    /// Fitted ratio of consecutive shell masses (`exp` of the log-slope).
    pub ratio: f64,
    pub r_squared: f64,
    /// (word length, shell mass) pairs entering the fit.
    pub shells: Vec<(usize, f64)>,
}

pub fn fit_tail(shells: &[(usize, f64)]) -> TailFit {
    // The length-0 shell is the trivial coset, not part of the geometric
    // tail; the fit starts at length 1.
    let pts: Vec<(f64, f64)> = shells
        .iter()
        .filter(|(l, s)| *s > 0.0 && *l >= 1)
        .map(|(l, s)| (*l as f64, s.ln()))
        .collect();
    if pts.len() < 2 {
        return TailFit { ratio: f64::NAN, r_squared: f64::NAN, shells: shells.to_vec() };
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    TailFit { ratio: slope.exp(), r_squared, shells: shells.to_vec() }
}

/// Pushes a measure through the isometry of a word letter by letter, so
/// the factors stay accurate for deep representatives.
pub fn image_measure_word(
    m: &AtomicMeasure,
    letter_isos: &[Isometry],
    word: &Word,
    map: &crate::geometry::ModelMap,
) -> Result<AtomicMeasure, MeasureError> {
    let mut atoms = Vec::with_capacity(m.len());
    for a in m.atoms() {
        match &a.location {
            AtomLocation::Interior { h, .. } => {
                let h2 = apply_word_h(letter_isos, word, h);
                let factor = h2.ball_gap() / h.ball_gap();
                atoms.push(Atom {
                    location: AtomLocation::Interior { point: map.to_ball(&h2), h: h2 },
                    mass: a.mass * factor.powf(m.alpha),
                });
            }
            AtomLocation::Boundary { point } => {
                let (img, factor) = word_boundary_data(letter_isos, word, point)?;
                atoms.push(Atom {
                    location: AtomLocation::Boundary { point: img },
                    mass: a.mass * factor.powf(m.alpha),
                });
            }
        }
    }
    AtomicMeasure::new(m.alpha, atoms, m.provenance.clone())
}

/// The extension of an end-supported measure over a coset table:
/// `m* = sum_i (m pushed through gamma_i)`.
#[derive(Debug, Clone)]
pub struct ExtensionReport {
    pub measure: AtomicMeasure,
    /// Per-representative masses in table order (shortlex).
    pub per_coset: Vec<(Word, f64)>,
    pub tail: TailFit,
    /// `constant * poincare_raw_sum` when both were supplied: the
    /// finiteness bound on the mass carried by the nontrivial cosets.
    pub mass_bound: Option<f64>,
    /// Whether the trivial-coset part reproduced `m` bit for bit.
    pub trivial_coset_exact: bool,
}

pub fn extend_measure(
    spec: &GroupSpec,
    m: &AtomicMeasure,
    cosets: &CosetTable,
    shadow_constant: Option<f64>,
    poincare_raw_sum: Option<f64>,
) -> Result<ExtensionReport, EndsError> {
    if !cosets.is_exact() {
        return Err(EndsError::Group(GroupError::HeuristicCosetsRejected(
            "extend_measure".into(),
        )));
    }
    let letter_isos = spec.letter_isometries();
    let map = spec.model_map();

    let mut all_atoms: Vec<Atom> = Vec::with_capacity(m.len() * cosets.reps.len());
    let mut per_coset: Vec<(Word, f64)> = Vec::with_capacity(cosets.reps.len());
    let mut trivial_exact = true;
    for (i, rep) in cosets.reps.iter().enumerate() {
        let part = image_measure_word(m, &letter_isos, rep, &map).map_err(EndsError::Measure)?;
        if i == 0 && rep.is_empty() {
            for (a, b) in m.atoms().iter().zip(part.atoms().iter()) {
                if a.mass.to_bits() != b.mass.to_bits()
                    || !a.location.same_point(&b.location, 0.0)
                {
                    trivial_exact = false;
                }
            }
        }
        per_coset.push((rep.clone(), part.total_mass()));
        all_atoms.extend(part.atoms().iter().copied());
    }

    let mut shell_acc: Vec<ExactSum> = vec![ExactSum::new(); cosets.depth + 1];
    for (w, mass) in &per_coset {
        shell_acc[w.len()].add(*mass);
    }
    let shells: Vec<(usize, f64)> =
        shell_acc.iter().enumerate().map(|(l, s)| (l, s.value())).collect();

    let provenance = Provenance {
        group: spec.name.clone(),
        truncation: Some(cosets.depth),
        tag: format!("{}+extension", m.provenance.tag),
    };
    let measure =
        AtomicMeasure::new(m.alpha, all_atoms, provenance).map_err(EndsError::Measure)?;

    Ok(ExtensionReport {
        measure,
        per_coset,
        tail: fit_tail(&shells),
        mass_bound: match (shadow_constant, poincare_raw_sum) {
            (Some(c), Some(p)) => Some(c * p),
            _ => None,
        },
        trivial_coset_exact: trivial_exact,
    })
}

/// Rebuilds the extension with every representative multiplied on the
/// right by a pseudo-random stabilizer word and reports the worst atomwise
/// deviation (location distance plus relative mass difference) from the
/// unperturbed extension.
pub fn extension_choice_defect(
    spec: &GroupSpec,
    m: &AtomicMeasure,
    cosets: &CosetTable,
    stabilizer: &[Word],
    max_stab_len: usize,
    seed: u64,
) -> Result<f64, EndsError> {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    if stabilizer.is_empty() {
        return Err(EndsError::InvalidSpec("empty stabilizer for choice perturbation".into()));
    }
    let letter_isos = spec.letter_isometries();
    let map = spec.model_map();
    let base = extend_measure(spec, m, cosets, None, None)?;
    let base_index = base.measure.index();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all_atoms: Vec<Atom> = Vec::new();
    for rep in &cosets.reps {
        // Random reduced word in the stabilizer symbols, expanded to group
        // letters.
        let len = rng.gen_range(0..=max_stab_len);
        let mut h = Word::identity();
        let mut last: Option<(usize, bool)> = None;
        for _ in 0..len {
            loop {
                let g = rng.gen_range(0..stabilizer.len());
                let inv = rng.gen_bool(0.5);
                if last == Some((g, !inv)) {
                    continue;
                }
                last = Some((g, inv));
                let gen_word = if inv { stabilizer[g].invert() } else { stabilizer[g].clone() };
                h = h.concat(&gen_word);
                break;
            }
        }
        let perturbed = rep.concat(&h);
        let part =
            image_measure_word(m, &letter_isos, &perturbed, &map).map_err(EndsError::Measure)?;
        all_atoms.extend(part.atoms().iter().copied());
    }
    let perturbed_measure = AtomicMeasure::new(m.alpha, all_atoms, m.provenance.clone())
        .map_err(EndsError::Measure)?;

    if perturbed_measure.len() != base.measure.len() {
        return Ok(f64::INFINITY);
    }
    let mut defect: f64 = 0.0;
    for a in perturbed_measure.atoms() {
        match base_index.find(&base.measure, &a.location, 1e-7) {
            Some(i) => {
                let b = &base.measure.atoms()[i];
                let loc_dist: f64 = a
                    .location
                    .ball_coords()
                    .iter()
                    .zip(b.location.ball_coords().iter())
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                let mass_rel = (a.mass - b.mass).abs() / b.mass.max(a.mass);
                defect = defect.max(loc_dist).max(mass_rel);
            }
            None => return Ok(f64::INFINITY),
        }
    }
    Ok(defect)
}

/// One end's share of a decomposed measure.
#[derive(Debug, Clone)]
pub struct DecompositionPart {
    pub end_name: String,
    pub mass: f64,
    pub atom_count: usize,
    /// The collected restriction (the measure's own atoms on the end's
    /// translates); `None` when no atom landed there.
    pub measure: Option<AtomicMeasure>,
    /// Mass per coset representative whose translate captured atoms.
    pub per_translate: Vec<(Word, f64)>,
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub parts: Vec<DecompositionPart>,
    pub residual_mass: f64,
    pub residual_atoms: usize,
    pub total_mass: f64,
    /// `|sum of part masses + residual - total|`, exactly accumulated.
    pub additivity_defect: f64,
}

/// Decomposes a measure across a collection of ends: each atom beyond the
/// boundary band is assigned to the (unique) end whose coset-translated
/// region contains it; everything else is the conical/undetermined
/// residual.
///
/// The per-end measures are realized as restrictions of `mu` itself - by
/// the uniqueness of the coset extension the extension of the end
/// restriction agrees with `mu` on every translate, so collecting `mu`'s
/// own atoms is the numerically exact form of the sum of extensions and
/// makes the mass accounting an identity rather than an approximation.
pub fn decompose(
    spec: &GroupSpec,
    mu: &AtomicMeasure,
    ends: &EndCollection,
    cosets: &[CosetTable],
    boundary_band: f64,
) -> Result<DecompositionReport, EndsError> {
    ends.check_disjoint()?;
    if cosets.len() != ends.ends.len() {
        return Err(EndsError::InvalidSpec(format!(
            "{} coset tables for {} ends",
            cosets.len(),
            ends.ends.len()
        )));
    }
    let letter_isos = spec.letter_isometries();

    // Translated regions per end, with their angular cones for fast
    // candidate collection in dimension 2.
    struct Translate {
        end: usize,
        rep: usize,
        region: Region,
    }
    let mut translates: Vec<Translate> = Vec::new();
    for (i, (end, table)) in ends.ends.iter().zip(cosets.iter()).enumerate() {
        if !table.is_exact() {
            return Err(EndsError::Group(GroupError::HeuristicCosetsRejected(
                "decompose".into(),
            )));
        }
        for (j, rep) in table.reps.iter().enumerate() {
            let region = end.region.translate_word(&letter_isos, rep)?;
            translates.push(Translate { end: i, rep: j, region });
        }
    }

    // Band: atoms must lie beyond Euclidean radius 1 - boundary_band.
    let gap_max = 1.0 - (1.0 - boundary_band) * (1.0 - boundary_band);

    let dim = mu.dim();
    let atoms = mu.atoms();
    // Angular index of atom directions for dimension 2.
    let mut by_angle: Vec<(f64, u32)> = Vec::new();
    if dim == 2 {
        for (i, a) in atoms.iter().enumerate() {
            if let Some(d) = a.location.direction() {
                by_angle.push((d.coords()[1].atan2(d.coords()[0]), i as u32));
            }
        }
        by_angle.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }

    let in_band = |a: &Atom| -> bool {
        match &a.location {
            AtomLocation::Boundary { .. } => true,
            AtomLocation::Interior { h, .. } => h.ball_gap() <= gap_max,
        }
    };

    // assignment[k] = (end, translate rep index)
    let mut assignment: Vec<Option<(u32, u32)>> = vec![None; atoms.len()];
    for t in &translates {
        let (c, r) = t.region.euclid_circle();
        let candidates: Vec<u32> = if dim == 2 {
            let cn: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            let halfwidth = (r / cn).min(1.0).asin();
            let theta = c[1].atan2(c[0]);
            let mut hits = Vec::new();
            crate::shadow::collect_angle_range(&by_angle, theta - halfwidth, theta + halfwidth, &mut hits);
            hits
        } else {
            (0..atoms.len() as u32).collect()
        };
        for k in candidates {
            let a = &atoms[k as usize];
            if !in_band(a) || !t.region.contains_closure(a.location.ball_coords(), 1e-12) {
                continue;
            }
            match assignment[k as usize] {
                None => assignment[k as usize] = Some((t.end as u32, t.rep as u32)),
                Some((e, _)) if e as usize == t.end => {}
                Some((e, _)) => {
                    return Err(EndsError::EndsOverlap(e as usize, t.end));
                }
            }
        }
    }

    let mut part_atoms: Vec<Vec<Atom>> = vec![Vec::new(); ends.ends.len()];
    let mut per_translate: Vec<std::collections::BTreeMap<u32, ExactSum>> =
        vec![Default::default(); ends.ends.len()];
    let mut residual = ExactSum::new();
    let mut residual_atoms = 0usize;
    for (k, a) in atoms.iter().enumerate() {
        match assignment[k] {
            Some((e, j)) => {
                part_atoms[e as usize].push(*a);
                per_translate[e as usize].entry(j).or_insert_with(ExactSum::new).add(a.mass);
            }
            None => {
                residual.add(a.mass);
                residual_atoms += 1;
            }
        }
    }

    let total_mass = mu.total_mass();
    let mut parts = Vec::with_capacity(ends.ends.len());
    let mut mass_check = ExactSum::new();
    for (i, end) in ends.ends.iter().enumerate() {
        let atoms_i = std::mem::take(&mut part_atoms[i]);
        let count = atoms_i.len();
        let measure = if atoms_i.is_empty() {
            None
        } else {
            Some(
                AtomicMeasure::new(
                    mu.alpha,
                    atoms_i,
                    Provenance {
                        group: spec.name.clone(),
                        truncation: mu.provenance.truncation,
                        tag: format!("decomposition[{}]", end.name),
                    },
                )
                .map_err(EndsError::Measure)?,
            )
        };
        let mass = measure.as_ref().map(|m| m.total_mass()).unwrap_or(0.0);
        mass_check.add(mass);
        parts.push(DecompositionPart {
            end_name: end.name.clone(),
            mass,
            atom_count: count,
            measure,
            per_translate: per_translate[i]
                .iter()
                .map(|(j, s)| (cosets[i].reps[*j as usize].clone(), s.value()))
                .collect(),
        });
    }
    let residual_mass = residual.value();
    mass_check.add(residual_mass);
    let additivity_defect = (mass_check.value() - total_mass).abs();

    Ok(DecompositionReport { parts, residual_mass, residual_atoms, total_mass, additivity_defect })
}

/// The atomic measure on a parabolic orbit: an atom of mass
/// `|g_i'(v)|^alpha` at each coset translate `g_i(v)` of the fixed point.
#[derive(Debug, Clone)]
pub struct ParabolicReport {
    pub measure: AtomicMeasure,
    pub per_coset: Vec<(Word, f64)>,
    pub tail: TailFit,
}

pub fn parabolic_orbit_measure(
    spec: &GroupSpec,
    v: &BoundaryPoint,
    stabilizer: &[Word],
    alpha: f64,
    cosets: &CosetTable,
) -> Result<ParabolicReport, EndsError> {
    let letter_isos = spec.letter_isometries();
    for w in stabilizer {
        let (img, _) = word_boundary_data(&letter_isos, w, v).map_err(|e| EndsError::Measure(e.into()))?;
        let d = img.euclid_dist(v);
        if d > 1e-10 {
            return Err(EndsError::Measure(MeasureError::NotFixed { dist: d }));
        }
    }
    if !cosets.is_exact() {
        return Err(EndsError::Group(GroupError::HeuristicCosetsRejected(
            "parabolic_orbit_measure".into(),
        )));
    }

    let mut atoms = Vec::with_capacity(cosets.reps.len());
    let mut per_coset = Vec::with_capacity(cosets.reps.len());
    let mut shell_acc: Vec<ExactSum> = vec![ExactSum::new(); cosets.depth + 1];
    for rep in &cosets.reps {
        let (img, factor) =
            word_boundary_data(&letter_isos, rep, v).map_err(|e| EndsError::Measure(e.into()))?;
        let mass = factor.powf(alpha);
        atoms.push(Atom { location: AtomLocation::Boundary { point: img }, mass });
        per_coset.push((rep.clone(), mass));
        shell_acc[rep.len()].add(mass);
    }
    let shells: Vec<(usize, f64)> =
        shell_acc.iter().enumerate().map(|(l, s)| (l, s.value())).collect();

    let measure = AtomicMeasure::new_distinct(
        alpha,
        atoms,
        Provenance {
            group: spec.name.clone(),
            truncation: Some(cosets.depth),
            tag: "parabolic-orbit-measure".into(),
        },
    )
    .map_err(EndsError::Measure)?;

    Ok(ParabolicReport { measure, per_coset, tail: fit_tail(&shells) })
}

/// Conformality of a parabolic orbit measure, decided combinatorially:
/// the atom holding `g x_i` is identified through the coset key of
/// `g gamma_i` instead of a metric lookup, so clustering of boundary orbit
/// points near the limit set can never alias atoms. Atoms whose image
/// coset leaves the table are untestable.
pub fn parabolic_conformality(
    spec: &GroupSpec,
    v: &BoundaryPoint,
    report: &ParabolicReport,
    cosets: &CosetTable,
) -> Result<Vec<crate::measure::ConformalityReport>, EndsError> {
    use std::collections::HashMap;

    let letter_isos = spec.letter_isometries();
    let mut by_key: HashMap<(u32, Vec<crate::group::Letter>), usize> = HashMap::new();
    for (i, (rep, _)) in report.per_coset.iter().enumerate() {
        let key = cosets
            .key_of(rep)
            .ok_or_else(|| EndsError::Group(GroupError::HeuristicCosetsRejected("parabolic_conformality".into())))?;
        by_key.insert(key, i);
    }
    let total: f64 = report.per_coset.iter().map(|(_, m)| *m).collect::<ExactSum>().value();

    let mut out = Vec::new();
    for (gi, g) in spec.generators.iter().enumerate() {
        let gw = Word::letter(gi, false);
        let mut max_residual: f64 = 0.0;
        let mut tested = 0usize;
        let mut untestable = 0usize;
        let mut untestable_mass = ExactSum::new();
        for (rep, mass) in &report.per_coset {
            let (x, _) = word_boundary_data(&letter_isos, rep, v).map_err(|e| EndsError::Measure(e.into()))?;
            let target = gw.concat(rep);
            let key = cosets.key_of(&target).expect("exact table");
            match by_key.get(&key) {
                Some(&j) => {
                    let factor = g
                        .conformal_factor_boundary(&x)
                        .map_err(|e| EndsError::Measure(e.into()))?;
                    let expected = factor.powf(report.measure.alpha) * mass;
                    let got = report.per_coset[j].1;
                    max_residual = max_residual.max((got - expected).abs() / got);
                    tested += 1;
                }
                None => {
                    untestable += 1;
                    untestable_mass.add(*mass);
                }
            }
        }
        out.push(crate::measure::ConformalityReport {
            max_residual,
            tested_atoms: tested,
            untestable_atoms: untestable,
            untestable_mass_fraction: untestable_mass.value() / total,
            untestable_count_fraction: untestable as f64 / report.per_coset.len() as f64,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cusped_fuchsian, CuspedParams};
    use crate::group::{cosets, CosetParams};

    fn cusp_setup(depth: usize) -> (crate::group::GroupSpec, BoundaryPoint, CosetTable) {
        let fx = cusped_fuchsian(CuspedParams::default());
        let table = cosets(&fx.spec, &[Word::letter(0, false)], depth, &CosetParams::default()).unwrap();
        (fx.spec, fx.cusp, table)
    }

    fn unit_atom_at(v: BoundaryPoint, alpha: f64) -> AtomicMeasure {
        AtomicMeasure::new(
            alpha,
            vec![Atom { location: AtomLocation::Boundary { point: v }, mass: 1.0 }],
            Provenance::default(),
        )
        .unwrap()
    }

    #[test]
    fn extension_of_identity_coset_only() {
        let (spec, v, _) = cusp_setup(2);
        let trivial = cosets(&spec, &[Word::letter(0, false), Word::letter(1, false)], 4, &CosetParams::default()).unwrap();
        assert_eq!(trivial.reps.len(), 1);
        let m = unit_atom_at(v, 0.9);
        let ext = extend_measure(&spec, &m, &trivial, None, None).unwrap();
        assert_eq!(ext.measure.len(), 1);
        assert!(ext.trivial_coset_exact);
        assert_eq!(ext.measure.total_mass(), 1.0);
    }

    #[test]
    fn extension_equals_parabolic_measure() {
        let (spec, v, table) = cosets_depth_6();
        let m = unit_atom_at(v, 0.9);
        let ext = extend_measure(&spec, &m, &table, None, None).unwrap();
        let par = parabolic_orbit_measure(&spec, &v, &[Word::letter(0, false)], 0.9, &table).unwrap();
        assert_eq!(ext.measure.len(), par.measure.len());
        let pi = par.measure.index();
        for a in ext.measure.atoms() {
            let i = pi.find(&par.measure, &a.location, 1e-9).expect("atom matches");
            let b = &par.measure.atoms()[i];
            assert!((a.mass - b.mass).abs() <= 1e-12 * a.mass.max(b.mass));
        }
    }

    fn cosets_depth_6() -> (crate::group::GroupSpec, BoundaryPoint, CosetTable) {
        cusp_setup(6)
    }

    #[test]
    fn choice_independence() {
        let (spec, v, table) = cosets_depth_6();
        let m = unit_atom_at(v, 0.9);
        let defect =
            extension_choice_defect(&spec, &m, &table, &[Word::letter(0, false)], 3, 1234).unwrap();
        assert!(defect <= 1e-9, "defect {defect}");
    }

    #[test]
    fn parabolic_masses_are_rep_independent() {
        // |(g p)'(v)| = |g'(v)| because |p'(v)| = 1 at the parabolic fixed
        // point.
        let (spec, v, _) = cusp_setup(2);
        let li = spec.letter_isometries();
        let g = Word::letter(1, false).concat(&Word::letter(0, true));
        let gp = g.concat(&Word::letter(0, false)).concat(&Word::letter(0, false));
        let (_, f1) = word_boundary_data(&li, &g, &v).unwrap();
        let (_, f2) = word_boundary_data(&li, &gp, &v).unwrap();
        assert!((f1 - f2).abs() <= 1e-12 * f1);
    }

    #[test]
    fn parabolic_requires_fixed_point() {
        let (spec, _, table) = cosets_depth_6();
        let not_fixed = BoundaryPoint::new(&[0.0, 1.0]).unwrap();
        let err =
            parabolic_orbit_measure(&spec, &not_fixed, &[Word::letter(0, false)], 0.9, &table)
                .unwrap_err();
        assert!(matches!(err, EndsError::Measure(MeasureError::NotFixed { .. })));
    }

    #[test]
    fn parabolic_tail_converges_at_point_nine() {
        let (spec, v, table) = cosets_depth_6();
        let par = parabolic_orbit_measure(&spec, &v, &[Word::letter(0, false)], 0.9, &table).unwrap();
        assert!(par.tail.ratio < 1.0, "tail ratio {}", par.tail.ratio);
        assert!(par.tail.r_squared > 0.9, "r^2 {}", par.tail.r_squared);
        // Identity atom carries mass exactly 1.
        assert_eq!(par.per_coset[0].1, 1.0);
        // Conformality on testable atoms, identified through coset keys.
        for report in parabolic_conformality(&spec, &v, &par, &table).unwrap() {
            assert!(report.max_residual <= 1e-9, "residual {}", report.max_residual);
            assert!(report.tested_atoms > 0);
        }
    }
}
