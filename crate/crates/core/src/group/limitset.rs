use std::collections::HashMap;

use crate::error::GroupError;
use crate::geometry::{raw_attracting_fixed_point, BoundaryPoint};

use super::enumerate::{enumerate_with, NodeView};
use super::orbit::OrbitParams;
use super::spec::GroupSpec;

#[derive(Debug, Clone, Copy)]
pub struct LimitSetParams {
    /// Orbit points closer to the origin than this are not projected.
    pub min_dist: f64,
    /// Attracting fixed points are collected for words at least this long.
    pub min_word_len: usize,
    /// Samples within this Euclidean distance are merged.
    pub dedup_tol: f64,
    pub orbit: OrbitParams,
}

impl Default for LimitSetParams {
    fn default() -> Self {
        Self { min_dist: 8.0, min_word_len: 4, dedup_tol: 1e-6, orbit: OrbitParams::default() }
    }
}

/// Samples the limit set: radial projections of deep orbit points together
/// with attracting fixed points of long words, deduplicated and returned in
/// a deterministic lexicographic order.
pub fn limit_set_sample(
    spec: &GroupSpec,
    depth: usize,
    params: &LimitSetParams,
) -> Result<Vec<BoundaryPoint>, GroupError> {
    let map = spec.model_map();
    let dim = spec.dim;
    let y_h = map.to_half(&spec.basepoint);
    let min_dist = params.min_dist;
    let min_len = params.min_word_len;

    let states = enumerate_with(
        spec,
        &y_h,
        depth,
        params.orbit.cap,
        params.orbit.workers,
        |_| Vec::<BoundaryPoint>::new(),
        |out, node: NodeView<'_>| {
            if node.image.dist_origin() >= min_dist {
                if let Some(dir) = map.to_ball(node.image).direction() {
                    out.push(dir);
                }
            }
            if node.len() >= min_len {
                if let Some(fp) = raw_attracting_fixed_point(node.matrix, dim) {
                    out.push(fp);
                }
            }
        },
    )?;

    let mut samples: Vec<BoundaryPoint> = states.into_iter().flatten().collect();
    samples.sort_by(|a, b| {
        a.coords()
            .iter()
            .zip(b.coords().iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    // Tolerance dedup on a quantized grid; first (lexicographically
    // smallest) representative of each cluster survives.
    let cell_size = params.dedup_tol.max(1e-15);
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut kept: Vec<BoundaryPoint> = Vec::new();
    'outer: for s in samples {
        let mut key = [0i64; 3];
        for (i, c) in s.coords().iter().enumerate() {
            key[i] = (c / cell_size).floor() as i64;
        }
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                for dz in -1..=1i64 {
                    let probe = [key[0] + dx, key[1] + dy, key[2] + dz];
                    if let Some(cands) = grid.get(&probe) {
                        for &i in cands {
                            if kept[i].euclid_dist(&s) <= params.dedup_tol {
                                continue 'outer;
                            }
                        }
                    }
                }
            }
        }
        grid.entry(key).or_default().push(kept.len());
        kept.push(s);
    }
    Ok(kept)
}
