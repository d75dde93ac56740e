//! Heuristic classification of boundary points by ray tracing: conical-like
//! (the orbit keeps returning near the ray), endpoint-like for a declared
//! end (the ray tail sinks into translates of the end region), or
//! ordinary-like (the tail settles in a declared half-space off the limit
//! set). The verdicts are deliberately suffixed "-like": no finite
//! computation certifies the classification.

use serde::Serialize;

use crate::ends::{EndCollection, Region};
use crate::error::EndsError;
use crate::geometry::BoundaryPoint;
use crate::group::{
    cosets, orbit, reduced_words, CosetParams, GroupSpec, OrbitParams, Presentation, Word,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryClass {
    ConicalLike,
    EndpointLike(usize),
    OrdinaryLike,
    Undetermined,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyBudget {
    /// Ray depth in hyperbolic length.
    pub depth_t: f64,
    /// Return threshold: the orbit must come this close to a ray point.
    pub rho: f64,
    /// Number of evenly spaced checkpoints on the ray.
    pub checkpoints: usize,
    /// Minimum distinct returns (or monotone region checkpoints) in the
    /// tail half.
    pub min_returns: usize,
    /// Orbit truncation used for the return test.
    pub orbit_depth: usize,
    /// Word length bound for end-region translates.
    pub translate_depth: usize,
    pub cap: u64,
    pub workers: usize,
}

impl Default for ClassifyBudget {
    fn default() -> Self {
        Self {
            depth_t: 25.0,
            rho: 0.5,
            checkpoints: 50,
            min_returns: 5,
            orbit_depth: 8,
            translate_depth: 5,
            cap: crate::group::DEFAULT_WORD_CAP,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckpointRecord {
    pub t: f64,
    /// Distance from the ray point to the nearest orbit point.
    pub orbit_dist: f64,
    /// Deepest containing end translate, as (end index, signed distance to
    /// its boundary).
    pub region: Option<(usize, f64)>,
    pub in_ordinary: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyOutcome {
    pub class: BoundaryClass,
    pub trace: Vec<CheckpointRecord>,
}

/// Precomputed data shared across many classifications: orbit polar table
/// and translated end regions.
pub struct Classifier<'a> {
    spec: &'a GroupSpec,
    ends: &'a EndCollection,
    budget: ClassifyBudget,
    /// (direction, dist, sinh dist) of orbit points.
    orbit_polar: Vec<(Option<BoundaryPoint>, f64, f64)>,
    /// Translated end regions: (end index, region).
    translates: Vec<(usize, Region)>,
}

impl<'a> Classifier<'a> {
    pub fn new(
        spec: &'a GroupSpec,
        ends: &'a EndCollection,
        budget: ClassifyBudget,
    ) -> Result<Self, EndsError> {
        ends.check_disjoint()?;
        let table = orbit(
            spec,
            &spec.basepoint,
            budget.orbit_depth,
            &OrbitParams { cap: budget.cap, workers: budget.workers, ..Default::default() },
        )
        .map_err(EndsError::Group)?;
        let orbit_polar = table
            .entries
            .iter()
            .map(|e| (e.image.direction(), e.dist, e.dist.sinh()))
            .collect();

        let letter_isos = spec.letter_isometries();
        let mut translates = Vec::new();
        for (i, end) in ends.ends.iter().enumerate() {
            let reps: Vec<Word> = match spec.presentation {
                Presentation::Free => {
                    cosets(spec, &end.stabilizer, budget.translate_depth, &CosetParams {
                        cap: budget.cap,
                        ..Default::default()
                    })
                    .map_err(EndsError::Group)?
                    .reps
                }
                Presentation::Unknown => {
                    reduced_words(spec.num_generators(), budget.translate_depth, budget.cap)
                        .map_err(EndsError::Group)?
                }
            };
            for rep in reps {
                translates.push((i, end.region.translate_word(&letter_isos, &rep)?));
            }
        }
        Ok(Self { spec, ends, budget, orbit_polar, translates })
    }

    /// Walks the geodesic ray toward `xi` and classifies it.
    pub fn classify(&self, xi: &BoundaryPoint) -> ClassifyOutcome {
        let trace = self.trace_ray(xi);
        let b = &self.budget;
        let tail_start = trace.len() / 2;

        // Conical: enough returns in the tail half.
        let returns = trace[tail_start..].iter().filter(|c| c.orbit_dist <= b.rho).count();
        if returns >= b.min_returns {
            return ClassifyOutcome { class: BoundaryClass::ConicalLike, trace };
        }

        // Endpoint: the whole tail sits in translates of one end with the
        // boundary distance increasing across the last checkpoints.
        if let Some(end) = self.endpoint_candidate(&trace[tail_start..]) {
            return ClassifyOutcome { class: BoundaryClass::EndpointLike(end), trace };
        }

        // Ordinary: the tail settles inside a declared ordinary half-space.
        let tail_ordinary = trace[tail_start..].iter().rev().take(b.min_returns);
        if self.ends.ordinary.iter().count() > 0
            && tail_ordinary.clone().count() >= b.min_returns
            && tail_ordinary.clone().all(|c| c.in_ordinary)
        {
            return ClassifyOutcome { class: BoundaryClass::OrdinaryLike, trace };
        }

        ClassifyOutcome { class: BoundaryClass::Undetermined, trace }
    }

    /// Ends whose tail test passes, for the disjointness report.
    pub fn endpoint_candidates(&self, xi: &BoundaryPoint) -> Vec<usize> {
        let trace = self.trace_ray(xi);
        let tail = &trace[trace.len() / 2..];
        (0..self.ends.ends.len())
            .filter(|&i| self.end_tail_test(tail, i))
            .collect()
    }

    fn trace_ray(&self, xi: &BoundaryPoint) -> Vec<CheckpointRecord> {
        let b = &self.budget;
        let mut out = Vec::with_capacity(b.checkpoints);
        for k in 1..=b.checkpoints {
            let t = b.depth_t * k as f64 / b.checkpoints as f64;
            // Ray point in polar form: direction xi, distance t; its ball
            // coordinates stay representable while the exact gap comes from
            // t itself.
            let coords: Vec<f64> = xi.coords().iter().map(|c| c * (t / 2.0).tanh()).collect();
            let gap = 1.0 / (t / 2.0).cosh().powi(2);

            // Nearest orbit point via the cancellation-free law of cosines:
            // cosh d = cosh(t - d_e) + sinh t sinh d_e (1 - cos psi).
            let st = t.sinh();
            let mut min_cosh = f64::INFINITY;
            for (dir, de, sd) in &self.orbit_polar {
                let cos_psi = match dir {
                    Some(d) => d
                        .coords()
                        .iter()
                        .zip(xi.coords().iter())
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
                        .clamp(-1.0, 1.0),
                    None => 1.0,
                };
                let c = (t - de).cosh() + st * sd * (1.0 - cos_psi);
                if c < min_cosh {
                    min_cosh = c;
                }
            }
            let orbit_dist = min_cosh.max(1.0).acosh();

            // Deepest containing translate.
            let mut region: Option<(usize, f64)> = None;
            for (end_idx, r) in &self.translates {
                if r.contains_closure(&coords, 0.0) {
                    let d = r.signed_dist_coords(&coords, gap);
                    match region {
                        Some((_, best)) if best >= d => {}
                        _ => region = Some((*end_idx, d)),
                    }
                }
            }
            let in_ordinary = self.ends.ordinary.iter().any(|r| r.contains_coords(&coords));
            out.push(CheckpointRecord { t, orbit_dist, region, in_ordinary });
        }
        out
    }

    fn endpoint_candidate(&self, tail: &[CheckpointRecord]) -> Option<usize> {
        (0..self.ends.ends.len()).find(|&i| self.end_tail_test(tail, i))
    }

    fn end_tail_test(&self, tail: &[CheckpointRecord], end: usize) -> bool {
        let b = &self.budget;
        if tail.len() < b.min_returns {
            return false;
        }
        // Whole tail inside translates of this end...
        if !tail.iter().all(|c| matches!(c.region, Some((e, _)) if e == end)) {
            return false;
        }
        // ...with boundary distance increasing over the last checkpoints.
        let last: Vec<f64> = tail
            .iter()
            .rev()
            .take(b.min_returns)
            .map(|c| c.region.unwrap().1)
            .collect();
        last.windows(2).all(|w| w[1] <= w[0] + 1e-9)
    }

    pub fn spec(&self) -> &GroupSpec {
        self.spec
    }
}

/// Result of the endpoint-disjointness scan over a sample of boundary
/// points.
#[derive(Debug, Clone, Serialize)]
pub struct DisjointnessReport {
    pub samples: usize,
    pub conical: usize,
    pub endpoint: Vec<usize>,
    pub ordinary: usize,
    pub undetermined: usize,
    /// Points whose endpoint tail test passed for two distinct ends.
    pub violations: Vec<(Vec<f64>, usize, usize)>,
}

/// Classifies every sample and reports any point claimed by two ends.
pub fn endpoints_disjointness_check(
    classifier: &Classifier<'_>,
    samples: &[BoundaryPoint],
) -> DisjointnessReport {
    let nends = classifier.ends.ends.len();
    let mut report = DisjointnessReport {
        samples: samples.len(),
        conical: 0,
        endpoint: vec![0; nends],
        ordinary: 0,
        undetermined: 0,
        violations: Vec::new(),
    };
    for xi in samples {
        let cands = classifier.endpoint_candidates(xi);
        if cands.len() >= 2 {
            report.violations.push((xi.coords().to_vec(), cands[0], cands[1]));
        }
        match classifier.classify(xi).class {
            BoundaryClass::ConicalLike => report.conical += 1,
            BoundaryClass::EndpointLike(i) => report.endpoint[i] += 1,
            BoundaryClass::OrdinaryLike => report.ordinary += 1,
            BoundaryClass::Undetermined => report.undetermined += 1,
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cusped_fuchsian, schottky, CuspedParams};

    #[test]
    fn generator_fixed_point_is_conical() {
        let fx = cusped_fuchsian(CuspedParams::default());
        let b = &fx.spec.generators[1];
        let fp = b.attracting_fixed_point(1e-9).unwrap();
        let classifier = Classifier::new(&fx.spec, &fx.ends, ClassifyBudget::default()).unwrap();
        let out = classifier.classify(&fp);
        assert_eq!(out.class, BoundaryClass::ConicalLike, "trace: {:?}", out.trace.last());
    }

    #[test]
    fn cusp_is_endpoint_like_for_the_horoball_end() {
        let fx = cusped_fuchsian(CuspedParams::default());
        let classifier = Classifier::new(&fx.spec, &fx.ends, ClassifyBudget::default()).unwrap();
        let out = classifier.classify(&fx.cusp);
        assert_eq!(out.class, BoundaryClass::EndpointLike(0), "trace: {:?}", out.trace.last());
    }

    #[test]
    fn schottky_gap_arc_is_ordinary() {
        let fx = schottky(4.0);
        let ends = crate::ends::EndCollection::new(vec![], false, fx.ordinary.clone()).unwrap();
        let classifier = Classifier::new(&fx.spec, &ends, ClassifyBudget::default()).unwrap();
        // Midpoint of the first free arc (at angle pi/4).
        let xi = BoundaryPoint::new(&[
            std::f64::consts::FRAC_PI_4.cos(),
            std::f64::consts::FRAC_PI_4.sin(),
        ])
        .unwrap();
        let out = classifier.classify(&xi);
        assert_eq!(out.class, BoundaryClass::OrdinaryLike);
    }

    #[test]
    fn disjointness_scan_is_clean_on_cusped_fixture() {
        let fx = cusped_fuchsian(CuspedParams::default());
        let classifier = Classifier::new(&fx.spec, &fx.ends, ClassifyBudget::default()).unwrap();
        let samples =
            crate::group::limit_set_sample(&fx.spec, 7, &crate::group::LimitSetParams::default())
                .unwrap();
        let take: Vec<BoundaryPoint> = samples.into_iter().step_by(7).take(60).collect();
        let report = endpoints_disjointness_check(&classifier, &take);
        assert!(report.violations.is_empty());
    }
}
