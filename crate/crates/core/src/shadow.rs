//! Shadows of hyperbolic balls seen from the origin, the measured
//! shadow-lemma constant, and the escape-mass estimate into thin shells.

use serde::Serialize;

use crate::error::EndsError;
use crate::exact::ExactSum;
use crate::geometry::{dist_polar, BallPoint, BoundaryPoint};
use crate::group::{enumerate_with, GroupSpec, NodeView, Word, DEFAULT_WORD_CAP};
use crate::measure::{image_measure, AtomLocation, AtomicMeasure};
use crate::poincare::{convergence_verdict, ConvergenceVerdict};

/// The shadow from the origin of the hyperbolic ball `D(y, r)`: every point
/// of the closed ball whose radial geodesic segment from the origin meets
/// the ball. On the sphere at infinity that is exactly the cap of angular
/// radius `phi = arcsin(sinh r / sinh d(0,y))` around the direction of `y`;
/// interior membership additionally requires the segment (not just the full
/// ray) to reach the ball.
#[derive(Debug, Clone)]
pub struct Shadow {
    /// Direction of the center; `None` when the shadow is the full ball
    /// (the origin lies inside `D(y, r)`).
    pub axis: Option<BoundaryPoint>,
    /// Angular radius in (0, pi].
    pub angular_radius: f64,
    /// Hyperbolic distance of the source ball center from the origin.
    pub center_dist: f64,
    /// Hyperbolic radius of the source ball.
    pub radius: f64,
}

impl Shadow {
    /// Shadow of `D(y, r)` from the origin.
    pub fn from_ball(y: &BallPoint, r: f64) -> Self {
        let d = crate::geometry::dist(y, &BallPoint::origin(y.dim()))
            .expect("shadow centers stay clear of the boundary");
        Self::from_polar(y.direction(), d, r)
    }

    /// Shadow from polar data: direction of the center and `d(0, y)`.
    pub fn from_polar(axis: Option<BoundaryPoint>, center_dist: f64, r: f64) -> Self {
        assert!(r > 0.0, "shadow radius must be positive");
        if center_dist <= r || axis.is_none() {
            return Self {
                axis: None,
                angular_radius: std::f64::consts::PI,
                center_dist,
                radius: r,
            };
        }
        let s = (r.sinh() / center_dist.sinh()).min(1.0);
        Self { axis, angular_radius: s.asin(), center_dist, radius: r }
    }

    pub fn is_full(&self) -> bool {
        self.axis.is_none()
    }

    /// Membership of a boundary direction: the infinite ray meets the ball
    /// exactly when the angle to the axis is at most `phi`.
    pub fn contains_direction(&self, dir: &BoundaryPoint) -> bool {
        match &self.axis {
            None => true,
            Some(axis) => axis.angle_to(dir) <= self.angular_radius,
        }
    }

    /// Membership of an interior point given in polar form (direction and
    /// hyperbolic distance from the origin): the segment from the origin
    /// must meet `D(y, r)`. All arithmetic runs on (distance, angle) pairs,
    /// so arbitrarily deep points are exact.
    pub fn contains_polar(&self, dir: Option<&BoundaryPoint>, dist: f64) -> bool {
        let Some(axis) = &self.axis else {
            return true;
        };
        let Some(dir) = dir else {
            // The origin itself: inside iff d(0, y) <= r, i.e. full shadow.
            return false;
        };
        let psi = axis.angle_to(dir);
        if psi > self.angular_radius {
            return false;
        }
        // Closest point of the full ray at parameter t* with
        // tanh t* = tanh(d_y) cos(psi); clamp to the segment [0, dist].
        let t_star = (self.center_dist.tanh() * psi.cos()).atanh();
        let min_dist = if t_star <= dist {
            // sinh of the ray-to-center distance.
            (self.center_dist.sinh() * psi.sin()).asinh()
        } else {
            dist_polar(dist, self.center_dist, psi)
        };
        min_dist <= self.radius
    }

    pub fn contains_location(&self, loc: &AtomLocation) -> bool {
        match loc.dist_origin() {
            None => self.contains_direction(&loc.direction().expect("boundary atoms have directions")),
            Some(d) => self.contains_polar(loc.direction().as_ref(), d),
        }
    }
}

/// Sum of atom masses inside a shadow (interior atoms via the segment test,
/// boundary atoms via the cap test), accumulated exactly in canonical atom
/// order.
pub fn shadow_mass(m: &AtomicMeasure, shadow: &Shadow) -> f64 {
    m.atoms()
        .iter()
        .filter(|a| shadow.contains_location(&a.location))
        .map(|a| a.mass)
        .collect::<ExactSum>()
        .value()
}

/// Precomputed polar data of a measure's atoms for fast shadow scans,
/// with an angular index in dimension 2.
pub struct ShadowScanIndex {
    polar: Vec<(Option<BoundaryPoint>, Option<f64>, f64)>,
    /// (angle, atom index) sorted by angle; dimension 2 only.
    by_angle: Option<Vec<(f64, u32)>>,
}

impl ShadowScanIndex {
    pub fn build(m: &AtomicMeasure) -> Self {
        let polar: Vec<_> = m
            .atoms()
            .iter()
            .map(|a| (a.location.direction(), a.location.dist_origin(), a.mass))
            .collect();
        let by_angle = if m.dim() == 2 {
            let mut v: Vec<(f64, u32)> = polar
                .iter()
                .enumerate()
                .filter_map(|(i, (dir, _, _))| {
                    dir.as_ref().map(|d| (d.coords()[1].atan2(d.coords()[0]), i as u32))
                })
                .collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            Some(v)
        } else {
            None
        };
        Self { polar, by_angle }
    }

    /// Exact mass of the shadow against the indexed atoms.
    pub fn mass(&self, shadow: &Shadow) -> f64 {
        let mut hits: Vec<u32> = Vec::new();
        match (&shadow.axis, &self.by_angle) {
            (Some(axis), Some(by_angle)) if shadow.angular_radius < std::f64::consts::PI => {
                let theta = axis.coords()[1].atan2(axis.coords()[0]);
                let phi = shadow.angular_radius;
                collect_angle_range(by_angle, theta - phi, theta + phi, &mut hits);
            }
            _ => hits.extend(0..self.polar.len() as u32),
        }
        // Atoms without a direction (an interior atom at the origin) are
        // not in the angular index; they belong only to the full shadow,
        // which takes the all-atoms branch above.
        hits.sort_unstable();
        let mut acc = ExactSum::new();
        for i in hits {
            let (dir, dist, mass) = &self.polar[i as usize];
            let inside = match dist {
                None => shadow.contains_direction(dir.as_ref().expect("boundary atom direction")),
                Some(d) => shadow.contains_polar(dir.as_ref(), *d),
            };
            if inside {
                acc.add(*mass);
            }
        }
        acc.value()
    }
}

pub(crate) fn collect_angle_range(by_angle: &[(f64, u32)], lo: f64, hi: f64, out: &mut Vec<u32>) {
    use std::f64::consts::{PI, TAU};
    // Normalize to [-pi, pi] and split a wrapped interval in two.
    let span = hi - lo;
    if span >= TAU {
        out.extend(by_angle.iter().map(|(_, i)| *i));
        return;
    }
    let norm = |a: f64| {
        let mut x = (a + PI).rem_euclid(TAU) - PI;
        if x == PI {
            x = -PI;
        }
        x
    };
    let (a, b) = (norm(lo), norm(hi));
    let mut ranges = Vec::new();
    if a <= b {
        ranges.push((a, b));
    } else {
        ranges.push((-PI, b));
        ranges.push((a, PI));
    }
    for (ra, rb) in ranges {
        let start = by_angle.partition_point(|(t, _)| *t < ra - 1e-15);
        let mut k = start;
        while k < by_angle.len() && by_angle[k].0 <= rb + 1e-15 {
            out.push(by_angle[k].1);
            k += 1;
        }
    }
}

/// One scanned word of a shadow-lemma verification.
#[derive(Debug, Clone, Serialize)]
pub struct ShadowRatio {
    pub word: String,
    pub dist: f64,
    pub shadow_mass: f64,
    /// `shadow_mass * exp(alpha d(0, w z))`.
    pub ratio: f64,
}

/// Measured shadow-lemma data: the constant is the maximum over all scanned
/// words of `m(S_r(w z)) exp(alpha d(0, w z))`.
#[derive(Debug, Clone, Serialize)]
pub struct ShadowLemmaReport {
    pub constant: f64,
    pub argmax: Option<ShadowRatio>,
    pub alpha: f64,
    pub shadow_radius: f64,
    pub depth: usize,
    pub words_scanned: u64,
    /// Words whose shadow was too thin to resolve in double precision.
    pub words_skipped: u64,
    pub nonzero_ratios: u64,
    /// Per-word records, kept when requested (canonical word order is not
    /// guaranteed; rows carry their own word strings).
    pub ratios: Vec<ShadowRatio>,
}

#[derive(Debug, Clone, Copy)]
pub struct ShadowScanParams {
    pub cap: u64,
    pub workers: usize,
    pub keep_ratios: bool,
    /// Shadows whose angular radius falls below this are skipped and
    /// counted: double precision resolves directions to about 1e-16, so
    /// membership in thinner caps is not decidable from coordinates.
    pub min_resolvable_angle: f64,
}

impl Default for ShadowScanParams {
    fn default() -> Self {
        Self { cap: DEFAULT_WORD_CAP, workers: 1, keep_ratios: false, min_resolvable_angle: 1e-14 }
    }
}

struct ScanState {
    best: f64,
    best_word: Option<(Word, f64, f64)>,
    scanned: u64,
    skipped: u64,
    nonzero: u64,
    kept: Vec<(Word, f64, f64, f64)>,
}

/// Scans all words of length at most `depth` and measures
/// `m(S_r(w z)) exp(alpha d(0, w z))`. The measure is expected to be
/// normalized (total mass 1); `z` defaults to the group basepoint.
pub fn verify_shadow_lemma(
    spec: &GroupSpec,
    m: &AtomicMeasure,
    z: &BallPoint,
    r: f64,
    alpha: f64,
    depth: usize,
    params: &ShadowScanParams,
) -> Result<ShadowLemmaReport, EndsError> {
    let total = m.total_mass();
    if (total - 1.0).abs() > 1e-9 {
        return Err(EndsError::Measure(crate::error::MeasureError::InvalidMeasure(format!(
            "shadow lemma expects total mass 1, got {total}"
        ))));
    }
    scan_shadows(spec, m, z, r, alpha, depth, params, |img| {
        let dir = img.ball_direction();
        (dir, img.dist)
    })
}

/// Conjugated rerun: the measure is replaced by its image under `g` and
/// every shadow center by its `g`-translate.
pub fn verify_shadow_lemma_conjugated(
    spec: &GroupSpec,
    m: &AtomicMeasure,
    g: &crate::geometry::Isometry,
    z: &BallPoint,
    r: f64,
    alpha: f64,
    depth: usize,
    params: &ShadowScanParams,
) -> Result<ShadowLemmaReport, EndsError> {
    let mg = image_measure(m, g).map_err(EndsError::Measure)?;
    let g2 = g.clone();
    scan_shadows(spec, &mg, z, r, alpha, depth, params, move |img| {
        let h2 = g2.apply_h(&img.h);
        let ball = crate::geometry::ModelMap::new(g2.dim()).to_ball(&h2);
        (ball.direction(), h2.dist_origin())
    })
}

struct ScanImage {
    h: crate::geometry::HPoint,
    dist: f64,
    ball: BallPoint,
}

impl ScanImage {
    fn ball_direction(&self) -> Option<BoundaryPoint> {
        self.ball.direction()
    }
}

#[allow(clippy::too_many_arguments)]
fn scan_shadows<F>(
    spec: &GroupSpec,
    m: &AtomicMeasure,
    z: &BallPoint,
    r: f64,
    alpha: f64,
    depth: usize,
    params: &ShadowScanParams,
    center_of: F,
) -> Result<ShadowLemmaReport, EndsError>
where
    F: Fn(&ScanImage) -> (Option<BoundaryPoint>, f64) + Sync,
{
    let index = ShadowScanIndex::build(m);
    let map = spec.model_map();
    let z_h = map.to_half(z);
    let keep = params.keep_ratios;
    let min_angle = params.min_resolvable_angle;

    let states = enumerate_with(
        spec,
        &z_h,
        depth,
        params.cap,
        params.workers,
        |_| ScanState { best: f64::NEG_INFINITY, best_word: None, scanned: 0, skipped: 0, nonzero: 0, kept: Vec::new() },
        |state, node: NodeView<'_>| {
            let img = ScanImage {
                h: *node.image,
                dist: node.image.dist_origin(),
                ball: map.to_ball(node.image),
            };
            let (dir, d) = center_of(&img);
            let shadow = Shadow::from_polar(dir, d, r);
            if !shadow.is_full() && shadow.angular_radius < min_angle {
                state.skipped += 1;
                return;
            }
            let mass = index.mass(&shadow);
            let ratio = mass * (alpha * d).exp();
            state.scanned += 1;
            if mass > 0.0 {
                state.nonzero += 1;
            }
            if ratio > state.best {
                state.best = ratio;
                state.best_word = Some((node.word(), d, mass));
            }
            if keep {
                state.kept.push((node.word(), d, mass, ratio));
            }
        },
    )
    .map_err(EndsError::Group)?;

    let mut report = ShadowLemmaReport {
        constant: 0.0,
        argmax: None,
        alpha,
        shadow_radius: r,
        depth,
        words_scanned: 0,
        words_skipped: 0,
        nonzero_ratios: 0,
        ratios: Vec::new(),
    };
    let names = &spec.generator_names;
    let mut best = f64::NEG_INFINITY;
    let mut best_word: Option<(Word, f64, f64)> = None;
    for s in states {
        report.words_scanned += s.scanned;
        report.words_skipped += s.skipped;
        report.nonzero_ratios += s.nonzero;
        // Deterministic tie-break: shorter, then lexicographically smaller
        // word wins.
        let better = match (&best_word, &s.best_word) {
            (_, None) => false,
            (None, Some(_)) => s.best > f64::NEG_INFINITY,
            (Some((bw, _, _)), Some((sw, _, _))) => {
                s.best > best || (s.best == best && sw.cmp_shortlex(bw).is_lt())
            }
        };
        if better {
            best = s.best;
            best_word = s.best_word.clone();
        }
        if keep {
            for (w, d, mass, ratio) in s.kept {
                report.ratios.push(ShadowRatio {
                    word: w.display(names),
                    dist: d,
                    shadow_mass: mass,
                    ratio,
                });
            }
        }
    }
    report.constant = best.max(0.0);
    report.argmax = best_word.map(|(w, d, mass)| ShadowRatio {
        word: w.display(names),
        dist: d,
        shadow_mass: mass,
        ratio: best,
    });
    Ok(report)
}

/// One station of the escape-mass table: the shell `H_r = {1-r <= |x| <= 1}`
/// corresponds to the distance threshold `cosh D = 2/(r(2-r)) - 1`.
#[derive(Debug, Clone, Serialize)]
pub struct EscapeStation {
    pub r: f64,
    pub dist_threshold: f64,
    pub count: u64,
    /// `sum exp(-alpha d(0, w z0))` over orbit points in the shell.
    pub raw_sum: f64,
    /// `constant * raw_sum`.
    pub c_r: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EscapeTable {
    pub end_name: String,
    pub alpha: f64,
    pub depth: usize,
    pub constant: f64,
    pub verdict_at_alpha: ConvergenceVerdict,
    pub stations: Vec<EscapeStation>,
}

/// Computes `c_r = c * sum_{w z0 in H_r} exp(-alpha d(0, w z0))` along a
/// grid of shell widths decreasing toward the boundary. The convergence of
/// the series at `alpha` is a hypothesis; it is probed on a shallow table
/// first and failure is an error, not a warning.
#[allow(clippy::too_many_arguments)]
pub fn escape_mass(
    spec: &GroupSpec,
    end_name: &str,
    z0: &BallPoint,
    alpha: f64,
    r_grid: &[f64],
    depth: usize,
    shadow_constant: f64,
    params: &ShadowScanParams,
) -> Result<EscapeTable, EndsError> {
    if r_grid.is_empty() {
        return Err(EndsError::InvalidSpec("empty escape grid".into()));
    }
    for w in r_grid.windows(2) {
        if w[1] >= w[0] {
            return Err(EndsError::InvalidSpec(
                "escape grid must decrease toward the boundary".into(),
            ));
        }
    }
    if *r_grid.first().unwrap() > 1.0 || *r_grid.last().unwrap() <= 0.0 {
        return Err(EndsError::InvalidSpec("escape grid entries must lie in (0, 1]".into()));
    }

    // Hypothesis probe at a shallow truncation.
    let probe_depth = depth.min(9);
    let table = crate::group::orbit(
        spec,
        z0,
        probe_depth,
        &crate::group::OrbitParams { cap: params.cap, workers: params.workers, ..Default::default() },
    )
    .map_err(EndsError::Group)?;
    let verdict = convergence_verdict(&table, alpha);
    if verdict != ConvergenceVerdict::ConvergesLikely {
        return Err(EndsError::Analysis(crate::error::AnalysisError::HypothesisMissing(format!(
            "series verdict at alpha = {alpha} is {verdict:?}, need converges-likely"
        ))));
    }

    let thresholds: Vec<f64> = r_grid
        .iter()
        .map(|&r| {
            let gap_max = r * (2.0 - r);
            (2.0 / gap_max - 1.0).max(1.0).acosh()
        })
        .collect();

    let map = spec.model_map();
    let z_h = map.to_half(z0);
    let nst = thresholds.len();
    let thresholds_ref = &thresholds;
    let states = enumerate_with(
        spec,
        &z_h,
        depth,
        params.cap,
        params.workers,
        |_| (vec![ExactSum::new(); nst], vec![0u64; nst]),
        |state: &mut (Vec<ExactSum>, Vec<u64>), node: NodeView<'_>| {
            let d = node.image.dist_origin();
            let term = (-alpha * d).exp();
            for (j, &thr) in thresholds_ref.iter().enumerate() {
                if d >= thr {
                    state.0[j].add(term);
                    state.1[j] += 1;
                }
            }
        },
    )
    .map_err(EndsError::Group)?;

    let mut sums: Vec<ExactSum> = (0..nst).map(|_| ExactSum::new()).collect();
    let mut counts = vec![0u64; nst];
    for (accs, cs) in states {
        for j in 0..nst {
            sums[j].merge(&accs[j]);
            counts[j] += cs[j];
        }
    }

    let stations = r_grid
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let raw = sums[j].value();
            EscapeStation {
                r,
                dist_threshold: thresholds[j],
                count: counts[j],
                raw_sum: raw,
                c_r: shadow_constant * raw,
            }
        })
        .collect();

    Ok(EscapeTable {
        end_name: end_name.to_string(),
        alpha,
        depth,
        constant: shadow_constant,
        verdict_at_alpha: verdict,
        stations,
    })
}
