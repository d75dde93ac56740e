use crate::error::GroupError;
use crate::geometry::{BallPoint, HPoint};

use super::enumerate::{enumerate_with, NodeView, DEFAULT_WORD_CAP};
use super::spec::{GroupSpec, Presentation};
use super::word::Word;

/// One row of an orbit table: a reduced word, the ball image of the
/// basepoint, and the geometry that deep-orbit arithmetic needs. `image_h`
/// and `gap` (`1 - |image|^2`) come straight from the half-space action, so
/// they keep full relative accuracy where the ball coordinates saturate.
#[derive(Debug, Clone)]
pub struct OrbitEntry {
    pub word: Word,
    pub image: BallPoint,
    pub image_h: HPoint,
    pub dist: f64,
    pub gap: f64,
}

/// All reduced-word images of a basepoint up to a word-length truncation,
/// in canonical (length, lex) order.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    pub group_name: String,
    pub presentation: Presentation,
    pub dim: usize,
    pub basepoint: BallPoint,
    pub depth: usize,
    pub dedup_tol: f64,
    pub entries: Vec<OrbitEntry>,
    /// Pairs (kept word, merged word) logged when a relation is detected in
    /// `Unknown` presentation mode. Never populated for free presentations.
    pub merged_relations: Vec<(Word, Word)>,
}

#[derive(Debug, Clone, Copy)]
pub struct OrbitParams {
    pub cap: u64,
    pub workers: usize,
    pub dedup_tol: f64,
}

impl Default for OrbitParams {
    fn default() -> Self {
        Self { cap: DEFAULT_WORD_CAP, workers: 1, dedup_tol: 1e-9 }
    }
}

/// Enumerates the orbit of `y` to word length `depth`.
///
/// For free presentations every reduced word is one entry. For unknown
/// presentations, entries whose matrices and images both coincide within
/// `dedup_tol` are merged onto the shortlex-first representative and the
/// relation is logged.
pub fn orbit(spec: &GroupSpec, y: &BallPoint, depth: usize, params: &OrbitParams) -> Result<OrbitTable, GroupError> {
    if y.dim() != spec.dim {
        return Err(GroupError::InvalidSpec("basepoint dimension mismatch".into()));
    }
    let map = spec.model_map();
    let y_h = map.to_half(y);

    let states = enumerate_with(
        spec,
        &y_h,
        depth,
        params.cap,
        params.workers,
        |_| Vec::<OrbitEntry>::new(),
        |out, node: NodeView<'_>| {
            let image_h = *node.image;
            out.push(OrbitEntry {
                word: node.word(),
                image: map.to_ball(&image_h),
                image_h,
                dist: image_h.dist_origin(),
                gap: image_h.ball_gap(),
            });
        },
    )?;

    // The enumeration grows words by prepending, so per-subtree order is
    // not the canonical one: bucket by length, then sort each length
    // lexicographically.
    let mut by_len: Vec<Vec<OrbitEntry>> = (0..=depth).map(|_| Vec::new()).collect();
    for state in states {
        for e in state {
            let l = e.word.len();
            by_len[l].push(e);
        }
    }
    for bucket in &mut by_len {
        bucket.sort_by(|a, b| a.word.letters().cmp(b.word.letters()));
    }
    let mut entries: Vec<OrbitEntry> = by_len.into_iter().flatten().collect();

    let mut merged_relations = Vec::new();
    if spec.presentation == Presentation::Unknown {
        entries = dedup_entries(spec, entries, params.dedup_tol, &mut merged_relations);
    }

    Ok(OrbitTable {
        group_name: spec.name.clone(),
        presentation: spec.presentation,
        dim: spec.dim,
        basepoint: *y,
        depth,
        dedup_tol: params.dedup_tol,
        entries,
        merged_relations,
    })
}

fn dedup_entries(
    spec: &GroupSpec,
    entries: Vec<OrbitEntry>,
    tol: f64,
    log: &mut Vec<(Word, Word)>,
) -> Vec<OrbitEntry> {
    use std::collections::HashMap;

    // Group candidates by a quantized matrix signature, then confirm with
    // the projective matrix distance and the image distance. Keys of
    // adjacent cells are probed so coincidences never straddle a cell edge.
    let isos: Vec<_> = entries.iter().map(|e| spec.word_isometry(&e.word)).collect();
    let cell = |v: f64| (v / tol / 4.0).round() as i64;
    let mut kept: Vec<OrbitEntry> = Vec::new();
    let mut kept_iso = Vec::new();
    let mut index: HashMap<i64, Vec<usize>> = HashMap::new();

    for (e, iso) in entries.into_iter().zip(isos.into_iter()) {
        let key = cell(iso.matrix()[0].re);
        let mut duplicate_of = None;
        'search: for probe in [key - 1, key, key + 1] {
            if let Some(cands) = index.get(&probe) {
                for &i in cands {
                    let same_matrix = iso.projective_dist(&kept_iso[i]) <= tol;
                    let same_image = e.image.euclid_dist(&kept[i].image) <= tol;
                    if same_matrix && same_image {
                        duplicate_of = Some(i);
                        break 'search;
                    }
                }
            }
        }
        match duplicate_of {
            Some(i) => {
                if log.len() < 10_000 {
                    log.push((kept[i].word.clone(), e.word));
                }
            }
            None => {
                index.entry(key).or_default().push(kept.len());
                kept.push(e);
                kept_iso.push(iso);
            }
        }
    }
    kept
}

/// Number of table entries within hyperbolic distance `R` of the origin.
pub fn orbit_count(table: &OrbitTable, radius: f64) -> usize {
    table.entries.iter().filter(|e| e.dist <= radius).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Isometry;
    use crate::group::enumerate::free_word_count;

    fn cyclic(len: f64) -> GroupSpec {
        GroupSpec::new(
            "cyclic",
            2,
            Presentation::Free,
            vec![("g".into(), Isometry::axis_loxodromic(2, len))],
            None,
        )
        .unwrap()
    }

    #[test]
    fn cyclic_loxodromic_distances() {
        let len = 1.3;
        let spec = cyclic(len);
        let table = orbit(&spec, &BallPoint::origin(2), 6, &OrbitParams::default()).unwrap();
        assert_eq!(table.entries.len(), 13);
        for e in &table.entries {
            let k = e.word.len() as f64;
            assert!((e.dist - k * len).abs() < 1e-9, "word {} dist {}", e.word, e.dist);
        }
    }

    #[test]
    fn identity_only_spec_merges_to_one_entry() {
        // A generator equal to a rotation by 2 pi / 1 (the identity cannot
        // be a generator of a free spec, so presentation is unknown).
        let spec = GroupSpec::new(
            "trivialish",
            2,
            Presentation::Unknown,
            vec![("r".into(), Isometry::rotation_2d(0.0))],
            None,
        )
        .unwrap();
        let y = BallPoint::new(&[0.2, 0.1]).unwrap();
        let table = orbit(&spec, &y, 5, &OrbitParams::default()).unwrap();
        assert_eq!(table.entries.len(), 1);
        assert!(table.entries[0].word.is_empty());
        assert!(table.entries[0].image.euclid_dist(&y) < 1e-12);
        assert!(!table.merged_relations.is_empty());
    }

    #[test]
    fn finite_rotation_relation_detected() {
        // A rotation of order 5: words collapse onto 5 distinct elements.
        let spec = GroupSpec::new(
            "c5",
            2,
            Presentation::Unknown,
            vec![("r".into(), Isometry::rotation_2d(std::f64::consts::TAU / 5.0))],
            None,
        )
        .unwrap();
        let y = BallPoint::new(&[0.4, 0.0]).unwrap();
        let table = orbit(&spec, &y, 12, &OrbitParams::default()).unwrap();
        assert_eq!(table.entries.len(), 5);
        assert!(!table.merged_relations.is_empty());
    }

    #[test]
    fn entry_matrix_matches_word_composition() {
        let spec = cyclic(0.9);
        let y = BallPoint::new(&[0.1, 0.3]).unwrap();
        let table = orbit(&spec, &y, 5, &OrbitParams::default()).unwrap();
        for e in &table.entries {
            let m = spec.word_isometry(&e.word);
            let img = m.apply(&y).unwrap();
            assert!(img.euclid_dist(&e.image) < 1e-10);
        }
    }

    #[test]
    fn orbit_is_worker_count_invariant() {
        let spec = GroupSpec::new(
            "two-gen",
            2,
            Presentation::Free,
            vec![
                ("a".into(), Isometry::axis_loxodromic(2, 1.1)),
                ("b".into(), Isometry::vertical_loxodromic(2, 0.8, 0.0)),
            ],
            None,
        )
        .unwrap();
        let y = BallPoint::new(&[0.05, -0.1]).unwrap();
        let mut tables = Vec::new();
        for workers in [1usize, 2, 3, 7] {
            let params = OrbitParams { workers, ..OrbitParams::default() };
            tables.push(orbit(&spec, &y, 6, &params).unwrap());
        }
        let count = free_word_count(2, 6) as usize;
        for t in &tables {
            assert_eq!(t.entries.len(), count);
        }
        for t in &tables[1..] {
            for (a, b) in tables[0].entries.iter().zip(t.entries.iter()) {
                assert_eq!(a.word, b.word);
                assert_eq!(a.dist.to_bits(), b.dist.to_bits());
                assert_eq!(a.gap.to_bits(), b.gap.to_bits());
                for (x, y) in a.image.coords().iter().zip(b.image.coords().iter()) {
                    assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
    }

    #[test]
    fn orbit_count_monotone() {
        let spec = cyclic(0.7);
        let table = orbit(&spec, &BallPoint::origin(2), 8, &OrbitParams::default()).unwrap();
        assert_eq!(orbit_count(&table, 0.0), 1);
        assert_eq!(orbit_count(&table, 0.69), 1);
        let mut last = 0;
        for i in 0..40 {
            let r = i as f64 * 0.2;
            let n = orbit_count(&table, r);
            assert!(n >= last);
            last = n;
        }
        assert_eq!(last, table.entries.len());
    }
}
