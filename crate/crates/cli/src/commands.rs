use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use kleinlab_core::classify::{endpoints_disjointness_check, Classifier, ClassifyBudget};
use kleinlab_core::endmeasure::{extend_measure, parabolic_orbit_measure};
use kleinlab_core::ends::{EndCollection, EndSpec, Region};
use kleinlab_core::geometry::{BallPoint, BoundaryPoint};
use kleinlab_core::group::{cosets, limit_set_sample, CosetParams, LimitSetParams, OrbitParams};
use kleinlab_core::io;
use kleinlab_core::measure::{conformality_residual, orbit_measure, AtomicMeasure, Provenance};
use kleinlab_core::poincare::{critical_exponent, poincare_partial};
use kleinlab_core::shadow::{escape_mass, verify_shadow_lemma, ShadowScanParams};
use kleinlab_core::weaklimit::{
    bl_discrepancy_upper, caps_at_heaviest_atoms, weak_limit_run, WeakLimitParams,
};
use kleinlab_core::GroupSpec;

use crate::CommonArgs;

fn load_group(common: &CommonArgs) -> anyhow::Result<GroupSpec> {
    io::read_group_file(&common.group).map_err(|e| anyhow!(e))
}

fn load_ends(common: &CommonArgs, spec: &GroupSpec) -> anyhow::Result<EndCollection> {
    let path = common
        .ends
        .as_ref()
        .ok_or_else(|| anyhow!("this command needs --ends"))?;
    io::read_ends_file(spec, path).map_err(|e| anyhow!(e))
}

fn out_file(common: &CommonArgs, name: &str) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(&common.out)
        .with_context(|| format!("creating {}", common.out.display()))?;
    Ok(common.out.join(name))
}

fn write_bytes(common: &CommonArgs, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
    let path = out_file(common, name)?;
    std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_json<T: Serialize>(common: &CommonArgs, name: &str, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_bytes(common, name, text.as_bytes())
}

fn orbit_params(common: &CommonArgs) -> OrbitParams {
    OrbitParams { cap: common.cap, workers: common.workers, ..Default::default() }
}

fn scan_params(common: &CommonArgs) -> ShadowScanParams {
    ShadowScanParams { cap: common.cap, workers: common.workers, ..Default::default() }
}

pub fn orbit(common: &CommonArgs, depth: usize, sample_depth: Option<usize>) -> anyhow::Result<()> {
    let spec = load_group(common)?;
    let table = kleinlab_core::group::orbit(&spec, &spec.basepoint, depth, &orbit_params(common))?;
    let mut buf = Vec::new();
    io::write_orbit_csv(&mut buf, &spec, &table)?;
    write_bytes(common, "orbit.csv", &buf)?;

    let params = LimitSetParams { orbit: orbit_params(common), ..Default::default() };
    let samples = limit_set_sample(&spec, sample_depth.unwrap_or(depth), &params)?;
    let mut buf = Vec::new();
    io::write_boundary_csv(&mut buf, &samples)?;
    write_bytes(common, "limit_set.csv", &buf)?;
    println!(
        "orbit: {} entries (depth {depth}), {} limit-set samples",
        table.entries.len(),
        samples.len()
    );
    Ok(())
}

pub fn delta(
    common: &CommonArgs,
    depth: usize,
    alpha: f64,
    window: Option<(f64, f64)>,
) -> anyhow::Result<()> {
    let spec = load_group(common)?;
    let table = kleinlab_core::group::orbit(&spec, &spec.basepoint, depth, &orbit_params(common))?;
    let est = critical_exponent(&table, window)?;
    write_json(common, "delta.json", &est)?;

    let series = poincare_partial(&table, &BallPoint::origin(spec.dim), alpha);
    let mut buf = Vec::new();
    io::write_shells_csv(&mut buf, &series)?;
    write_bytes(common, "shells.csv", &buf)?;
    write_json(common, "series.json", &SeriesSummary::from(&series))?;
    println!(
        "delta: growth fit {:.4}, bisection {:.4} (stable: {})",
        est.delta_hat, est.delta_bisect, est.stable
    );
    Ok(())
}

#[derive(Serialize)]
struct SeriesSummary {
    exponent: f64,
    truncation: usize,
    partial_sum: f64,
    tail_ratio: Option<f64>,
    verdict: kleinlab_core::ConvergenceVerdict,
}

impl From<&kleinlab_core::SeriesEstimate> for SeriesSummary {
    fn from(e: &kleinlab_core::SeriesEstimate) -> Self {
        Self {
            exponent: e.exponent,
            truncation: e.truncation,
            partial_sum: e.partial_sum,
            tail_ratio: e.tail_ratio,
            verdict: e.verdict,
        }
    }
}

pub fn measure(common: &CommonArgs, alpha: f64, depth: usize, raw: bool) -> anyhow::Result<()> {
    let spec = load_group(common)?;
    let table = kleinlab_core::group::orbit(&spec, &spec.basepoint, depth, &orbit_params(common))?;
    let m = orbit_measure(&table, alpha, !raw)?;
    let mut buf = Vec::new();
    io::write_measure_csv(&mut buf, &m)?;
    write_bytes(common, "measure.csv", &buf)?;
    write_bytes(common, "measure.meta.json", io::measure_meta_json(&m).as_bytes())?;

    let reports: Vec<_> = spec
        .generators
        .iter()
        .zip(spec.generator_names.iter())
        .map(|(g, name)| (name.clone(), conformality_residual(&m, g)))
        .collect();
    write_json(common, "conformality.json", &reports)?;
    let worst = reports.iter().map(|(_, r)| r.max_residual).fold(0.0f64, f64::max);
    println!("measure: {} atoms, total {}, worst conformality residual {worst:.3e}", m.len(), m.total_mass());
    Ok(())
}

pub fn shadow_lemma(
    common: &CommonArgs,
    alpha: f64,
    depth: usize,
    measure_depth: usize,
    radius: f64,
) -> anyhow::Result<()> {
    let spec = load_group(common)?;
    let table =
        kleinlab_core::group::orbit(&spec, &spec.basepoint, measure_depth, &orbit_params(common))?;
    let m = orbit_measure(&table, alpha, true)?;
    let mut params = scan_params(common);
    params.keep_ratios = true;
    let report = verify_shadow_lemma(&spec, &m, &spec.basepoint, radius, alpha, depth, &params)?;

    let mut buf = Vec::new();
    io::write_shadow_csv(&mut buf, &report)?;
    write_bytes(common, "shadow_ratios.csv", &buf)?;
    write_json(common, "shadow.json", &ShadowSummary::from(&report))?;
    println!(
        "shadow-lemma: constant {:.6e} over {} words (argmax {})",
        report.constant,
        report.words_scanned,
        report.argmax.as_ref().map(|r| r.word.as_str()).unwrap_or("-")
    );
    Ok(())
}

#[derive(Serialize)]
struct ShadowSummary {
    constant: f64,
    alpha: f64,
    shadow_radius: f64,
    depth: usize,
    words_scanned: u64,
    nonzero_ratios: u64,
    argmax: Option<kleinlab_core::shadow::ShadowRatio>,
}

impl From<&kleinlab_core::shadow::ShadowLemmaReport> for ShadowSummary {
    fn from(r: &kleinlab_core::shadow::ShadowLemmaReport) -> Self {
        Self {
            constant: r.constant,
            alpha: r.alpha,
            shadow_radius: r.shadow_radius,
            depth: r.depth,
            words_scanned: r.words_scanned,
            nonzero_ratios: r.nonzero_ratios,
            argmax: r.argmax.clone(),
        }
    }
}

fn find_end<'e>(ends: &'e EndCollection, name: &str) -> anyhow::Result<(usize, &'e EndSpec)> {
    ends.ends
        .iter()
        .enumerate()
        .find(|(_, e)| e.name == name)
        .ok_or_else(|| anyhow!("no end named {name} in the ends file"))
}

/// A point on the boundary of an end region: the closest approach to the
/// origin (horoball: the rim point on the axis; half-space: the foot of
/// the perpendicular).
fn end_boundary_point(region: &Region) -> anyhow::Result<BallPoint> {
    let (c, r) = region.euclid_circle();
    let norm: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = (norm - r) / norm;
    let coords: Vec<f64> = c.iter().map(|v| v * scale).collect();
    Ok(BallPoint::new(&coords)?)
}

#[allow(clippy::too_many_arguments)]
pub fn escape(
    common: &CommonArgs,
    alpha: f64,
    depth: usize,
    end_name: &str,
    grid: &[f64],
    constant: Option<f64>,
    measure_depth: usize,
) -> anyhow::Result<()> {
    let spec = load_group(common)?;
    let ends = load_ends(common, &spec)?;
    let (_, end) = find_end(&ends, end_name)?;
    let z0 = end_boundary_point(&end.region)?;

    let c = match constant {
        Some(c) => c,
        None => {
            let table = kleinlab_core::group::orbit(
                &spec,
                &spec.basepoint,
                measure_depth,
                &orbit_params(common),
            )?;
            let m = orbit_measure(&table, alpha, true)?;
            verify_shadow_lemma(&spec, &m, &z0, 1.0, alpha, measure_depth, &scan_params(common))?
                .constant
        }
    };

    let table = escape_mass(&spec, end_name, &z0, alpha, grid, depth, c, &scan_params(common))?;
    let mut buf = Vec::new();
    io::write_escape_csv(&mut buf, &table)?;
    write_bytes(common, "escape.csv", &buf)?;
    write_json(common, "escape.json", &table)?;
    let first = table.stations.first().map(|s| s.c_r).unwrap_or(0.0);
    let last = table.stations.last().map(|s| s.c_r).unwrap_or(0.0);
    println!("escape: c_r from {first:.6e} to {last:.6e} over {} stations", table.stations.len());
    Ok(())
}

pub fn extend(common: &CommonArgs, alpha: f64, depth: usize, end_name: &str) -> anyhow::Result<()> {
    let spec = load_group(common)?;
    let ends = load_ends(common, &spec)?;
    let (_, end) = find_end(&ends, end_name)?;
    let Region::Horoball { base, .. } = &end.region else {
        bail!("extend needs a horoball end: its base point carries the unit atomic measure");
    };
    if end.stabilizer.is_empty() {
        bail!("end {end_name} declares no stabilizer generators");
    }

    let table = cosets(
        &spec,
        &end.stabilizer,
        depth,
        &CosetParams { cap: common.cap, ..Default::default() },
    )?;
    let m = AtomicMeasure::new(
        alpha,
        vec![kleinlab_core::Atom {
            location: kleinlab_core::AtomLocation::boundary(*base),
            mass: 1.0,
        }],
        Provenance { group: spec.name.clone(), truncation: None, tag: format!("unit-atom[{end_name}]") },
    )?;
    let report = extend_measure(&spec, &m, &table, None, None)?;

    let mut buf = Vec::new();
    io::write_measure_csv(&mut buf, &report.measure)?;
    write_bytes(common, "extension_measure.csv", &buf)?;
    write_bytes(common, "extension_measure.meta.json", io::measure_meta_json(&report.measure).as_bytes())?;
    let summary = ExtensionSummary {
        end: end_name.to_string(),
        alpha,
        coset_depth: depth,
        cosets: report.per_coset.len(),
        total_mass: report.measure.total_mass(),
        tail_ratio: report.tail.ratio,
        tail_r_squared: report.tail.r_squared,
        trivial_coset_exact: report.trivial_coset_exact,
        per_coset: report
            .per_coset
            .iter()
            .map(|(w, mass)| (w.display(&spec.generator_names), *mass))
            .collect(),
    };
    write_json(common, "extension.json", &summary)?;
    println!(
        "extend: {} cosets, total mass {:.6}, tail ratio {:.4}",
        summary.cosets, summary.total_mass, summary.tail_ratio
    );
    Ok(())
}

#[derive(Serialize)]
struct ExtensionSummary {
    end: String,
    alpha: f64,
    coset_depth: usize,
    cosets: usize,
    total_mass: f64,
    tail_ratio: f64,
    tail_r_squared: f64,
    trivial_coset_exact: bool,
    per_coset: Vec<(String, f64)>,
}

#[allow(clippy::too_many_arguments)]
pub fn decompose(
    common: &CommonArgs,
    alpha: f64,
    depth: usize,
    stations: &[f64],
    coset_depth: usize,
    band: f64,
    cap_count: usize,
    cap_angle: f64,
    write_measures: bool,
) -> anyhow::Result<()> {
    let spec = load_group(common)?;
    let ends = load_ends(common, &spec)?;
    let (horo_idx, horo) = ends
        .ends
        .iter()
        .enumerate()
        .find(|(_, e)| matches!(e.region, Region::Horoball { .. }))
        .ok_or_else(|| anyhow!("decompose runs stations into a horoball end; none declared"))?;
    let Region::Horoball { base, .. } = &horo.region else { unreachable!() };

    // Reference parabolic measure at the cusp defines the test caps.
    let coset_tables: Vec<_> = ends
        .ends
        .iter()
        .map(|e| {
            cosets(&spec, &e.stabilizer, coset_depth, &CosetParams { cap: common.cap, ..Default::default() })
        })
        .collect::<Result<_, _>>()?;
    let parabolic =
        parabolic_orbit_measure(&spec, base, &horo.stabilizer, alpha, &coset_tables[horo_idx])?;
    let caps = caps_at_heaviest_atoms(&parabolic.measure, cap_count, cap_angle);

    let run = weak_limit_run(
        &spec,
        base,
        stations,
        alpha,
        depth,
        caps,
        &WeakLimitParams { orbit: orbit_params(common) },
    )?;

    let station_summaries: Vec<_> = run.stations.iter().map(|(d, _)| d.clone()).collect();
    write_json(common, "stations.json", &station_summaries)?;

    let (_, deepest) = run.stations.last().expect("at least one station");
    let normalized_parabolic = parabolic.measure.clone().normalized();
    let bl_vs_parabolic = bl_discrepancy_upper(deepest, &normalized_parabolic);

    let report = kleinlab_core::endmeasure::decompose(&spec, deepest, &ends, &coset_tables, band)?;
    let summary = DecompositionSummary {
        alpha,
        depth,
        band,
        station: *stations.last().unwrap(),
        total_mass: report.total_mass,
        residual_mass: report.residual_mass,
        residual_atoms: report.residual_atoms,
        additivity_defect: report.additivity_defect,
        bl_deepest_vs_parabolic: bl_vs_parabolic,
        parabolic_tail_ratio: parabolic.tail.ratio,
        parts: report
            .parts
            .iter()
            .map(|p| PartSummary {
                end: p.end_name.clone(),
                mass: p.mass,
                atoms: p.atom_count,
                translates: p.per_translate.len(),
            })
            .collect(),
    };
    write_json(common, "decomposition.json", &summary)?;

    if write_measures {
        for (i, part) in report.parts.iter().enumerate() {
            if let Some(m) = &part.measure {
                let mut buf = Vec::new();
                io::write_measure_csv(&mut buf, m)?;
                write_bytes(common, &format!("part_{i}_{}.csv", part.end_name), &buf)?;
            }
        }
        let mut buf = Vec::new();
        io::write_measure_csv(&mut buf, deepest)?;
        write_bytes(common, "station_deepest.csv", &buf)?;
    }
    println!(
        "decompose: {} parts, residual {:.3e} ({} atoms), bl vs parabolic {:.3e}",
        summary.parts.len(),
        summary.residual_mass,
        summary.residual_atoms,
        summary.bl_deepest_vs_parabolic
    );
    Ok(())
}

#[derive(Serialize)]
struct PartSummary {
    end: String,
    mass: f64,
    atoms: usize,
    translates: usize,
}

#[derive(Serialize)]
struct DecompositionSummary {
    alpha: f64,
    depth: usize,
    band: f64,
    station: f64,
    total_mass: f64,
    residual_mass: f64,
    residual_atoms: usize,
    additivity_defect: f64,
    bl_deepest_vs_parabolic: f64,
    parabolic_tail_ratio: f64,
    parts: Vec<PartSummary>,
}

pub fn classify(
    common: &CommonArgs,
    samples: usize,
    points: Option<&Path>,
    ray_depth: f64,
    orbit_depth: usize,
) -> anyhow::Result<()> {
    let spec = load_group(common)?;
    let ends = match &common.ends {
        Some(_) => load_ends(common, &spec)?,
        None => EndCollection::new(vec![], false, vec![])?,
    };
    let budget = ClassifyBudget {
        depth_t: ray_depth,
        orbit_depth,
        cap: common.cap,
        workers: common.workers,
        ..Default::default()
    };
    let classifier = Classifier::new(&spec, &ends, budget)?;

    let pts: Vec<BoundaryPoint> = match points {
        Some(path) => read_points_csv(path, spec.dim)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            (0..samples)
                .map(|_| {
                    if spec.dim == 2 {
                        let t: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                        BoundaryPoint::new(&[t.cos(), t.sin()]).expect("unit")
                    } else {
                        loop {
                            let v = [
                                rng.gen_range(-1.0..1.0),
                                rng.gen_range(-1.0..1.0),
                                rng.gen_range(-1.0..1.0f64),
                            ];
                            if v.iter().map(|x| x * x).sum::<f64>() > 1e-4 {
                                break BoundaryPoint::new(&v).expect("unit");
                            }
                        }
                    }
                })
                .collect()
        }
    };

    let mut csv = String::from("x1,x2,x3,class,end\n");
    for xi in &pts {
        let outcome = classifier.classify(xi);
        let (class, end) = match outcome.class {
            kleinlab_core::classify::BoundaryClass::ConicalLike => ("conical-like", String::new()),
            kleinlab_core::classify::BoundaryClass::EndpointLike(i) => {
                ("endpoint-like", ends.ends[i].name.clone())
            }
            kleinlab_core::classify::BoundaryClass::OrdinaryLike => ("ordinary-like", String::new()),
            kleinlab_core::classify::BoundaryClass::Undetermined => ("undetermined", String::new()),
        };
        let mut coords: Vec<String> = xi.coords().iter().map(|v| format!("{v}")).collect();
        while coords.len() < 3 {
            coords.push(String::new());
        }
        csv.push_str(&format!("{},{class},{end}\n", coords.join(",")));
    }
    write_bytes(common, "classification.csv", csv.as_bytes())?;

    let report = endpoints_disjointness_check(&classifier, &pts);
    write_json(common, "disjointness.json", &report)?;
    println!(
        "classify: {} points -> conical {}, endpoint {:?}, ordinary {}, undetermined {} ({} violations)",
        report.samples,
        report.conical,
        report.endpoint,
        report.ordinary,
        report.undetermined,
        report.violations.len()
    );
    Ok(())
}

fn read_points_csv(path: &Path, dim: usize) -> anyhow::Result<Vec<BoundaryPoint>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line.starts_with('x') {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let coords: Vec<f64> = line
            .split(',')
            .take(dim)
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("{}:{}", path.display(), i + 1))?;
        out.push(BoundaryPoint::new(&coords).map_err(|e| anyhow!("{e}"))?);
    }
    Ok(out)
}
