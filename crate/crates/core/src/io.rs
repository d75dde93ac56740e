//! File formats: group and end definition JSON, CSV exports of orbit
//! tables, measures and reports.
//!
//! JSON generator maps serialize through ordered maps and all floats print
//! in shortest round-trip form, so a fixed input always produces identical
//! bytes.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ends::{EndCollection, EndFlags, EndSpec, Region};
use crate::error::{EndsError, GroupError};
use crate::geometry::{BallPoint, BoundaryPoint, Isometry};
use crate::group::{GroupSpec, OrbitTable, Presentation, Word};
use crate::measure::{AtomLocation, AtomicMeasure};
use crate::poincare::SeriesEstimate;
use crate::shadow::{EscapeTable, ShadowLemmaReport};

/// `[[re, im], [re, im]], [[re, im], [re, im]]`.
pub type MatrixJson = [[[f64; 2]; 2]; 2];

fn matrix_to_json(iso: &Isometry) -> MatrixJson {
    let m = iso.matrix();
    [
        [[m[0].re, m[0].im], [m[1].re, m[1].im]],
        [[m[2].re, m[2].im], [m[3].re, m[3].im]],
    ]
}

fn matrix_from_json(dim: usize, m: &MatrixJson) -> Result<Isometry, GroupError> {
    Isometry::from_matrix(
        dim,
        [
            Complex64::new(m[0][0][0], m[0][0][1]),
            Complex64::new(m[0][1][0], m[0][1][1]),
            Complex64::new(m[1][0][0], m[1][0][1]),
            Complex64::new(m[1][1][0], m[1][1][1]),
        ],
    )
    .map_err(GroupError::Geometry)
}

/// Standalone isometry serialization.
#[derive(Serialize, Deserialize)]
pub struct IsometryJson {
    pub matrix: MatrixJson,
    pub dim: usize,
}

impl From<&Isometry> for IsometryJson {
    fn from(iso: &Isometry) -> Self {
        Self { matrix: matrix_to_json(iso), dim: iso.dim() }
    }
}

impl TryFrom<&IsometryJson> for Isometry {
    type Error = GroupError;
    fn try_from(j: &IsometryJson) -> Result<Self, GroupError> {
        matrix_from_json(j.dim, &j.matrix)
    }
}

/// Group definition file.
#[derive(Serialize, Deserialize)]
pub struct GroupSpecJson {
    pub name: String,
    pub dim: usize,
    pub presentation: Presentation,
    pub generators: BTreeMap<String, MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Vec<f64>>,
}

pub fn group_to_json(spec: &GroupSpec) -> GroupSpecJson {
    GroupSpecJson {
        name: spec.name.clone(),
        dim: spec.dim,
        presentation: spec.presentation,
        generators: spec
            .generator_names
            .iter()
            .zip(spec.generators.iter())
            .map(|(n, g)| (n.clone(), matrix_to_json(g)))
            .collect(),
        basepoint: if spec.basepoint.norm_sq() == 0.0 {
            None
        } else {
            Some(spec.basepoint.coords().to_vec())
        },
    }
}

pub fn group_from_json(j: &GroupSpecJson) -> Result<GroupSpec, GroupError> {
    let mut named = Vec::with_capacity(j.generators.len());
    for (name, m) in &j.generators {
        named.push((name.clone(), matrix_from_json(j.dim, m)?));
    }
    let basepoint = match &j.basepoint {
        None => None,
        Some(c) => Some(
            BallPoint::new(c).map_err(GroupError::Geometry)?,
        ),
    };
    GroupSpec::new(j.name.clone(), j.dim, j.presentation, named, basepoint)
}

pub fn read_group_file(path: &std::path::Path) -> Result<GroupSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let j: GroupSpecJson =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    group_from_json(&j).map_err(|e| format!("{}: {e}", path.display()))
}

/// Words are serialized as `[name, exponent]` pairs.
pub type WordJson = Vec<(String, i64)>;

pub fn word_to_json(spec: &GroupSpec, w: &Word) -> WordJson {
    w.letters()
        .iter()
        .map(|l| {
            (
                spec.generator_names[l.generator()].clone(),
                if l.is_inverse() { -1 } else { 1 },
            )
        })
        .collect()
}

pub fn word_from_json(spec: &GroupSpec, pairs: &WordJson) -> Result<Word, GroupError> {
    let mut letters = Vec::new();
    for (name, exp) in pairs {
        let idx = spec
            .generator_index(name)
            .ok_or_else(|| GroupError::InvalidSpec(format!("unknown generator {name}")))?;
        for _ in 0..exp.unsigned_abs() {
            letters.push(crate::group::Letter::new(idx, *exp < 0));
        }
    }
    Ok(Word::from_letters(letters))
}

/// One end in the ends file.
#[derive(Serialize, Deserialize)]
pub struct EndSpecJson {
    pub name: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diameter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub stabilizer: Vec<WordJson>,
    pub flags: EndFlagsJson,
}

#[derive(Serialize, Deserialize, Default)]
pub struct EndFlagsJson {
    pub bounded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_type: Option<String>,
}

#[derive(Serialize, Deserialize)]
pub struct HalfspaceJson {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Ends definition file: declared ends, a completeness assertion, and
/// optional ordinary half-spaces for the classifier.
#[derive(Serialize, Deserialize)]
pub struct EndsFileJson {
    pub ends: Vec<EndSpecJson>,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ordinary: Vec<HalfspaceJson>,
}

pub fn ends_to_json(spec: &GroupSpec, ends: &EndCollection) -> EndsFileJson {
    let ends_json = ends
        .ends
        .iter()
        .map(|e| {
            let mut j = EndSpecJson {
                name: e.name.clone(),
                kind: String::new(),
                base: None,
                diameter: None,
                center: None,
                radius: None,
                stabilizer: e.stabilizer.iter().map(|w| word_to_json(spec, w)).collect(),
                flags: EndFlagsJson {
                    bounded: e.flags.bounded,
                    expected_type: e.flags.expected_type.clone(),
                },
            };
            match &e.region {
                Region::Horoball { base, diameter } => {
                    j.kind = "horoball".into();
                    j.base = Some(base.coords().to_vec());
                    j.diameter = Some(*diameter);
                }
                Region::Halfspace { center, radius } => {
                    j.kind = "halfspace".into();
                    j.center = Some(center.clone());
                    j.radius = Some(*radius);
                }
            }
            j
        })
        .collect();
    EndsFileJson {
        ends: ends_json,
        complete: ends.complete,
        ordinary: ends
            .ordinary
            .iter()
            .map(|r| {
                let (c, radius) = r.euclid_circle();
                match r {
                    Region::Halfspace { center, radius } => {
                        HalfspaceJson { center: center.clone(), radius: *radius }
                    }
                    Region::Horoball { .. } => HalfspaceJson { center: c, radius },
                }
            })
            .collect(),
    }
}

pub fn ends_from_json(spec: &GroupSpec, j: &EndsFileJson) -> Result<EndCollection, EndsError> {
    let mut ends = Vec::with_capacity(j.ends.len());
    for e in &j.ends {
        let region = match e.kind.as_str() {
            "horoball" => {
                let base = e
                    .base
                    .as_ref()
                    .ok_or_else(|| EndsError::InvalidSpec("horoball needs a base".into()))?;
                let base = BoundaryPoint::new(base).map_err(EndsError::Geometry)?;
                let diameter = e
                    .diameter
                    .ok_or_else(|| EndsError::InvalidSpec("horoball needs a diameter".into()))?;
                Region::horoball(base, diameter)?
            }
            "halfspace" => {
                let center = e
                    .center
                    .clone()
                    .ok_or_else(|| EndsError::InvalidSpec("halfspace needs a center".into()))?;
                let radius = e
                    .radius
                    .ok_or_else(|| EndsError::InvalidSpec("halfspace needs a radius".into()))?;
                Region::halfspace(center, radius)?
            }
            k => return Err(EndsError::InvalidSpec(format!("unknown end kind {k}"))),
        };
        let mut stabilizer = Vec::new();
        for w in &e.stabilizer {
            stabilizer.push(word_from_json(spec, w).map_err(EndsError::Group)?);
        }
        ends.push(EndSpec {
            name: e.name.clone(),
            region,
            stabilizer,
            flags: EndFlags {
                bounded: e.flags.bounded,
                expected_type: e.flags.expected_type.clone(),
            },
        });
    }
    let ordinary = j
        .ordinary
        .iter()
        .map(|h| Region::halfspace(h.center.clone(), h.radius))
        .collect::<Result<Vec<_>, _>>()?;
    EndCollection::new(ends, j.complete, ordinary)
}

pub fn read_ends_file(
    spec: &GroupSpec,
    path: &std::path::Path,
) -> Result<EndCollection, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let j: EndsFileJson =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    ends_from_json(spec, &j).map_err(|e| format!("{}: {e}", path.display()))
}

// ---- CSV exports ----

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// `word,x1,..,xn,dist`, canonical table order.
pub fn write_orbit_csv<W: Write>(
    out: &mut W,
    spec: &GroupSpec,
    table: &OrbitTable,
) -> std::io::Result<()> {
    let coords: Vec<String> = (1..=table.dim).map(|i| format!("x{i}")).collect();
    writeln!(out, "word,{},dist", coords.join(","))?;
    for e in &table.entries {
        let coords: Vec<String> = e.image.coords().iter().map(|&v| fmt(v)).collect();
        writeln!(out, "{},{},{}", e.word.display(&spec.generator_names), coords.join(","), fmt(e.dist))?;
    }
    Ok(())
}

/// `x1,..,xn` boundary sample rows.
pub fn write_boundary_csv<W: Write>(out: &mut W, points: &[BoundaryPoint]) -> std::io::Result<()> {
    if let Some(p) = points.first() {
        let coords: Vec<String> = (1..=p.dim()).map(|i| format!("x{i}")).collect();
        writeln!(out, "{}", coords.join(","))?;
    }
    for p in points {
        let coords: Vec<String> = p.coords().iter().map(|&v| fmt(v)).collect();
        writeln!(out, "{}", coords.join(","))?;
    }
    Ok(())
}

/// `kind,x1,..,xn,mass` rows in canonical atom order.
pub fn write_measure_csv<W: Write>(out: &mut W, m: &AtomicMeasure) -> std::io::Result<()> {
    let coords: Vec<String> = (1..=m.dim()).map(|i| format!("x{i}")).collect();
    writeln!(out, "kind,{},mass", coords.join(","))?;
    for a in m.atoms() {
        let kind = match a.location {
            AtomLocation::Interior { .. } => "interior",
            AtomLocation::Boundary { .. } => "boundary",
        };
        let coords: Vec<String> = a.location.ball_coords().iter().map(|&v| fmt(v)).collect();
        writeln!(out, "{kind},{},{}", coords.join(","), fmt(a.mass))?;
    }
    Ok(())
}

/// Sidecar metadata of a measure CSV.
#[derive(Serialize)]
pub struct MeasureMetaJson<'a> {
    pub alpha: f64,
    pub total_mass: f64,
    pub atoms: usize,
    pub provenance: &'a crate::measure::Provenance,
}

pub fn measure_meta_json(m: &AtomicMeasure) -> String {
    serde_json::to_string_pretty(&MeasureMetaJson {
        alpha: m.alpha,
        total_mass: m.total_mass(),
        atoms: m.len(),
        provenance: &m.provenance,
    })
    .expect("measure meta serializes")
}

/// `len,count,min_dist,max_dist,sum` per shell.
pub fn write_shells_csv<W: Write>(out: &mut W, est: &SeriesEstimate) -> std::io::Result<()> {
    writeln!(out, "len,count,min_dist,max_dist,sum")?;
    for s in &est.shells {
        writeln!(
            out,
            "{},{},{},{},{}",
            s.len,
            s.count,
            fmt(s.min_dist),
            fmt(s.max_dist),
            fmt(s.sum)
        )?;
    }
    Ok(())
}

/// `r,dist_threshold,count,raw_sum,c_r` per escape station.
pub fn write_escape_csv<W: Write>(out: &mut W, table: &EscapeTable) -> std::io::Result<()> {
    writeln!(out, "r,dist_threshold,count,raw_sum,c_r")?;
    for s in &table.stations {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt(s.r),
            fmt(s.dist_threshold),
            s.count,
            fmt(s.raw_sum),
            fmt(s.c_r)
        )?;
    }
    Ok(())
}

/// `word,dist,shadow_mass,ratio` rows of a shadow-lemma scan.
pub fn write_shadow_csv<W: Write>(out: &mut W, report: &ShadowLemmaReport) -> std::io::Result<()> {
    writeln!(out, "word,dist,shadow_mass,ratio")?;
    for r in &report.ratios {
        writeln!(out, "{},{},{},{}", r.word, fmt(r.dist), fmt(r.shadow_mass), fmt(r.ratio))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cusped_fuchsian, schottky, CuspedParams};
    use crate::group::{orbit, OrbitParams};

    #[test]
    fn group_round_trip() {
        let fx = schottky(4.0);
        let json = serde_json::to_string_pretty(&group_to_json(&fx.spec)).unwrap();
        let parsed: GroupSpecJson = serde_json::from_str(&json).unwrap();
        let spec2 = group_from_json(&parsed).unwrap();
        assert_eq!(spec2.name, fx.spec.name);
        assert_eq!(spec2.generator_names, fx.spec.generator_names);
        for (a, b) in spec2.generators.iter().zip(fx.spec.generators.iter()) {
            assert!(a.projective_dist(b) < 1e-15);
        }
        // Parsing renormalizes the determinant, which may nudge the last
        // ulp; repeated round trips stay within a tight drift bound.
        let mut current = spec2;
        for _ in 0..3 {
            let json_n = serde_json::to_string_pretty(&group_to_json(&current)).unwrap();
            current = group_from_json(&serde_json::from_str(&json_n).unwrap()).unwrap();
        }
        for (a, b) in current.generators.iter().zip(fx.spec.generators.iter()) {
            assert!(a.projective_dist(b) < 1e-13);
        }
    }

    #[test]
    fn ends_round_trip() {
        let fx = cusped_fuchsian(CuspedParams::default());
        let json = serde_json::to_string_pretty(&ends_to_json(&fx.spec, &fx.ends)).unwrap();
        let parsed: EndsFileJson = serde_json::from_str(&json).unwrap();
        let ends2 = ends_from_json(&fx.spec, &parsed).unwrap();
        assert_eq!(ends2.ends.len(), 2);
        ends2.validate(&fx.spec).unwrap();
        let json2 = serde_json::to_string_pretty(&ends_to_json(&fx.spec, &ends2)).unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn word_round_trip() {
        let fx = cusped_fuchsian(CuspedParams::default());
        let w = Word::letter(0, false)
            .concat(&Word::letter(1, true))
            .concat(&Word::letter(0, false));
        let json = word_to_json(&fx.spec, &w);
        let back = word_from_json(&fx.spec, &json).unwrap();
        assert_eq!(w, back);
        // Exponent folding.
        let squared = word_from_json(&fx.spec, &vec![("a".into(), 3), ("a".into(), -1)]).unwrap();
        assert_eq!(squared.len(), 2);
    }

    #[test]
    fn orbit_csv_shape() {
        let fx = schottky(4.0);
        let table = orbit(&fx.spec, &BallPoint::origin(2), 2, &OrbitParams::default()).unwrap();
        let mut buf = Vec::new();
        write_orbit_csv(&mut buf, &fx.spec, &table).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "word,x1,x2,dist");
        assert_eq!(lines.len(), 1 + table.entries.len());
        assert!(lines[1].starts_with("1,")); // identity row
    }
}
