//! Partial Poincare sums, convergence diagnostics and critical-exponent
//! estimation.
//!
//! Convergence of the series is a hypothesis, not something a truncation
//! can certify; every verdict here is a labeled heuristic with explicit
//! margins.

use serde::Serialize;

use crate::error::AnalysisError;
use crate::exact::ExactSum;
use crate::geometry::{dist, BallPoint};
use crate::group::OrbitTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceVerdict {
    ConvergesLikely,
    DivergesLikely,
    Undetermined,
}

/// Per-word-length statistics of one partial sum.
#[derive(Debug, Clone, Serialize)]
pub struct ShellStat {
    pub len: usize,
    pub count: usize,
    pub min_dist: f64,
    pub max_dist: f64,
    pub sum: f64,
}

/// A truncated Poincare series `P_N = sum exp(-s d(x, gamma y))` together
/// with shell diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesEstimate {
    pub exponent: f64,
    pub truncation: usize,
    pub partial_sum: f64,
    pub last_shell: f64,
    /// Fitted geometric ratio of consecutive shell sums, when enough
    /// nonzero shells exist.
    pub tail_ratio: Option<f64>,
    pub verdict: ConvergenceVerdict,
    pub shells: Vec<ShellStat>,
}

/// Margin around ratio 1 inside which no verdict is claimed.
pub const VERDICT_MARGIN: f64 = 0.05;

/// Number of trailing shell ratios folded into the tail-ratio fit.
const TAIL_SHELLS: usize = 4;

/// Evaluates the partial Poincare sum of an orbit table at exponent `s`
/// from basepoint `x`. Distances reuse the table's half-space geometry, so
/// the sum is bitwise reproducible for a given table.
pub fn poincare_partial(table: &OrbitTable, x: &BallPoint, s: f64) -> SeriesEstimate {
    let from_origin = x.norm_sq() == 0.0;
    let mut shell_acc: Vec<ExactSum> = (0..=table.depth).map(|_| ExactSum::new()).collect();
    let mut stats: Vec<(usize, f64, f64)> =
        vec![(0, f64::INFINITY, f64::NEG_INFINITY); table.depth + 1];

    for e in &table.entries {
        let d = if from_origin {
            e.dist
        } else {
            // cosh d = 1 + 2|x-w|^2 / (gap(x) gap(w)), with the image gap
            // taken from the half-space representation.
            let dx = x.euclid_dist(&e.image);
            (1.0 + 2.0 * dx * dx / (x.gap() * e.gap)).max(1.0).acosh()
        };
        let l = e.word.len();
        shell_acc[l].add((-s * d).exp());
        let st = &mut stats[l];
        st.0 += 1;
        st.1 = st.1.min(d);
        st.2 = st.2.max(d);
    }

    let mut total = ExactSum::new();
    let mut shells = Vec::with_capacity(table.depth + 1);
    for (l, acc) in shell_acc.iter().enumerate() {
        total.merge(acc);
        let (count, min_d, max_d) = stats[l];
        shells.push(ShellStat {
            len: l,
            count,
            min_dist: if count == 0 { f64::NAN } else { min_d },
            max_dist: if count == 0 { f64::NAN } else { max_d },
            sum: acc.value(),
        });
    }

    let tail_ratio = fitted_tail_ratio(&shells);
    let last_shell = shells.last().map(|s| s.sum).unwrap_or(0.0);
    let verdict = verdict_from_ratio(tail_ratio, last_shell, table.depth);

    SeriesEstimate {
        exponent: s,
        truncation: table.depth,
        partial_sum: total.value(),
        last_shell,
        tail_ratio,
        verdict,
        shells,
    }
}

fn fitted_tail_ratio(shells: &[ShellStat]) -> Option<f64> {
    let nonzero: Vec<&ShellStat> = shells.iter().filter(|s| s.sum > 0.0 && s.count > 0).collect();
    if nonzero.len() < 2 {
        return None;
    }
    let take = TAIL_SHELLS.min(nonzero.len() - 1);
    let last = nonzero[nonzero.len() - 1];
    let first = nonzero[nonzero.len() - 1 - take];
    let steps = (last.len - first.len) as f64;
    if steps <= 0.0 {
        return None;
    }
    Some((last.sum / first.sum).powf(1.0 / steps))
}

fn verdict_from_ratio(ratio: Option<f64>, last_shell: f64, truncation: usize) -> ConvergenceVerdict {
    if truncation > 0 && last_shell == 0.0 {
        // The deepest shell is empty: the group ran out of elements and the
        // series is a finite sum.
        return ConvergenceVerdict::ConvergesLikely;
    }
    match ratio {
        None => ConvergenceVerdict::Undetermined,
        Some(r) => {
            if r < 1.0 - VERDICT_MARGIN {
                ConvergenceVerdict::ConvergesLikely
            } else if r > 1.0 + VERDICT_MARGIN {
                ConvergenceVerdict::DivergesLikely
            } else {
                ConvergenceVerdict::Undetermined
            }
        }
    }
}

/// Heuristic convergence verdict of the series at exponent `s`.
pub fn convergence_verdict(table: &OrbitTable, s: f64) -> ConvergenceVerdict {
    poincare_partial(table, &BallPoint::origin(table.dim), s).verdict
}

/// Critical-exponent estimate: a growth fit of `log N(R)` against the
/// bisection of the shell tail ratio.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentEstimate {
    /// Least-squares slope of `log N(R)` over the fit window.
    pub delta_hat: f64,
    /// Exponent where the fitted shell tail ratio crosses 1.
    pub delta_bisect: f64,
    pub window: (f64, f64),
    /// Root-mean-square residual of the growth fit.
    pub fit_residual: f64,
    pub gap: f64,
    pub stable: bool,
}

/// Threshold on the estimator gap above which the estimate is flagged
/// unstable.
pub const STABILITY_GAP: f64 = 0.1;

pub fn critical_exponent(
    table: &OrbitTable,
    window: Option<(f64, f64)>,
) -> Result<ExponentEstimate, AnalysisError> {
    if table.entries.len() < 100 {
        return Err(AnalysisError::InsufficientDepth { count: table.entries.len(), need: 100 });
    }
    let mut dists: Vec<f64> = table.entries.iter().map(|e| e.dist).collect();
    dists.sort_by(f64::total_cmp);
    let r_max = *dists.last().unwrap();
    // Default window: the upper half of observed distances, clear of
    // small-radius transients.
    let (lo, hi) = window.unwrap_or((r_max / 2.0, r_max));

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &d) in dists.iter().enumerate() {
        if d >= lo && d <= hi && d > 0.0 {
            xs.push(d);
            ys.push(((i + 1) as f64).ln());
        }
    }
    if xs.len() < 10 {
        return Err(AnalysisError::InsufficientDepth { count: xs.len(), need: 10 });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys.iter()).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| {
            let p = slope * x + intercept;
            (y - p) * (y - p)
        })
        .sum();
    let fit_residual = (rss / n).sqrt();
    let max_delta = (table.dim - 1) as f64 + 0.1;
    let delta_hat = slope.clamp(0.0, max_delta);

    // Bisection of the fitted tail ratio in s; the ratio is strictly
    // decreasing in s, so the crossing is unique.
    let ratio_at = |s: f64| -> f64 {
        poincare_partial(table, &BallPoint::origin(table.dim), s)
            .tail_ratio
            .unwrap_or(0.0)
    };
    let mut lo_s = 0.0;
    let mut hi_s = (table.dim - 1) as f64 + 0.5;
    if ratio_at(lo_s) <= 1.0 {
        hi_s = 0.0;
    }
    for _ in 0..40 {
        if hi_s - lo_s < 1e-4 {
            break;
        }
        let mid = 0.5 * (lo_s + hi_s);
        if ratio_at(mid) > 1.0 {
            lo_s = mid;
        } else {
            hi_s = mid;
        }
    }
    let delta_bisect = 0.5 * (lo_s + hi_s);

    let gap = (delta_hat - delta_bisect).abs();
    Ok(ExponentEstimate {
        delta_hat,
        delta_bisect,
        window: (lo, hi),
        fit_residual,
        gap,
        stable: gap <= STABILITY_GAP,
    })
}

/// Triangle-inequality robustness: `P_N(x)` and `P_N(x')` differ by at most
/// the factor `exp(s d(x, x'))`. Returns the worst violation (nonpositive
/// when the invariant holds).
pub fn basepoint_robustness_defect(
    table: &OrbitTable,
    x: &BallPoint,
    x2: &BallPoint,
    s: f64,
) -> f64 {
    let p1 = poincare_partial(table, x, s).partial_sum;
    let p2 = poincare_partial(table, x2, s).partial_sum;
    let d = dist(x, x2).expect("robustness probes are interior");
    let bound = (s * d).exp();
    (p1 / p2).max(p2 / p1) - bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Isometry;
    use crate::group::{orbit, GroupSpec, OrbitParams, Presentation};

    fn cyclic_table(len: f64, depth: usize) -> OrbitTable {
        let spec = GroupSpec::new(
            "cyclic",
            2,
            Presentation::Free,
            vec![("g".into(), Isometry::axis_loxodromic(2, len))],
            None,
        )
        .unwrap();
        orbit(&spec, &BallPoint::origin(2), depth, &OrbitParams::default()).unwrap()
    }

    fn two_gen_table(depth: usize) -> OrbitTable {
        let spec = GroupSpec::new(
            "f2",
            2,
            Presentation::Free,
            vec![
                ("a".into(), Isometry::axis_loxodromic(2, 2.2)),
                ("b".into(), Isometry::vertical_loxodromic(2, 2.0, 0.0)),
            ],
            None,
        )
        .unwrap();
        orbit(&spec, &BallPoint::origin(2), depth, &OrbitParams::default()).unwrap()
    }

    #[test]
    fn single_atom_sum_is_one() {
        let table = cyclic_table(1.0, 0);
        let est = poincare_partial(&table, &BallPoint::origin(2), 1.3);
        assert_eq!(est.partial_sum, 1.0);
        // A truncation-0 table carries no tail evidence at all.
        assert_eq!(est.verdict, ConvergenceVerdict::Undetermined);
    }

    #[test]
    fn finite_group_orbit_converges() {
        // Order-5 rotation: shells beyond length 2 are empty after merging,
        // so the series is a finite sum.
        let spec = GroupSpec::new(
            "c5",
            2,
            Presentation::Unknown,
            vec![("r".into(), Isometry::rotation_2d(std::f64::consts::TAU / 5.0))],
            Some(BallPoint::new(&[0.3, 0.0]).unwrap()),
        )
        .unwrap();
        let table = orbit(&spec, &BallPoint::new(&[0.3, 0.0]).unwrap(), 8, &OrbitParams::default()).unwrap();
        let est = poincare_partial(&table, &BallPoint::origin(2), 0.4);
        assert_eq!(est.verdict, ConvergenceVerdict::ConvergesLikely);
        assert_eq!(est.last_shell, 0.0);
    }

    #[test]
    fn cyclic_geometric_closed_form() {
        let len = 0.9;
        let s = 0.7;
        let depth = 14;
        let table = cyclic_table(len, depth);
        let est = poincare_partial(&table, &BallPoint::origin(2), s);
        let q = (-s * len).exp();
        let expect = 1.0 + 2.0 * q * (1.0 - q.powi(depth as i32)) / (1.0 - q);
        assert!((est.partial_sum - expect).abs() < 1e-9, "{} vs {expect}", est.partial_sum);
        assert_eq!(est.verdict, ConvergenceVerdict::ConvergesLikely);
        assert!((est.tail_ratio.unwrap() - q).abs() < 1e-9);
    }

    #[test]
    fn zero_exponent_diverges_for_free_groups() {
        let table = two_gen_table(8);
        assert_eq!(convergence_verdict(&table, 0.0), ConvergenceVerdict::DivergesLikely);
    }

    #[test]
    fn partial_sums_monotone_in_truncation_and_exponent() {
        let mut last = 0.0;
        for depth in [2usize, 4, 6, 8] {
            let table = two_gen_table(depth);
            let p = poincare_partial(&table, &BallPoint::origin(2), 0.9).partial_sum;
            assert!(p > last);
            last = p;
        }
        let table = two_gen_table(8);
        let p_low = poincare_partial(&table, &BallPoint::origin(2), 0.5).partial_sum;
        let p_high = poincare_partial(&table, &BallPoint::origin(2), 0.9).partial_sum;
        assert!(p_high < p_low);
    }

    #[test]
    fn basepoint_robustness() {
        let table = two_gen_table(7);
        let x = BallPoint::new(&[0.2, -0.1]).unwrap();
        let x2 = BallPoint::new(&[-0.3, 0.4]).unwrap();
        for s in [0.3, 0.8, 1.4] {
            assert!(basepoint_robustness_defect(&table, &x, &x2, s) <= 1e-9);
        }
    }

    #[test]
    fn cyclic_critical_exponent_is_tiny() {
        let shallow = cyclic_table(2.0, 20);
        let err = critical_exponent(&shallow, None).unwrap_err();
        // 41 entries: not deep enough by the precondition.
        assert!(matches!(err, AnalysisError::InsufficientDepth { .. }));

        let table = cyclic_table(0.35, 120);
        let est = critical_exponent(&table, None).unwrap();
        assert!(est.delta_hat <= 0.05, "delta_hat = {}", est.delta_hat);
        assert!(est.delta_bisect <= 0.05, "delta_bisect = {}", est.delta_bisect);
    }

    #[test]
    fn free_group_exponent_in_range() {
        let table = two_gen_table(9);
        let est = critical_exponent(&table, None).unwrap();
        assert!(est.delta_hat > 0.0 && est.delta_hat < 1.0, "delta_hat = {}", est.delta_hat);
        assert!(est.delta_bisect > 0.0 && est.delta_bisect < 1.0);
    }
}
