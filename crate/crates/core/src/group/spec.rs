use serde::{Deserialize, Serialize};

use crate::error::GroupError;
use crate::geometry::{BallPoint, HPoint, Isometry, ModelMap};

use super::word::Word;

/// How much word algebra can be trusted.
///
/// `Free` asserts that the generators generate a free group: word counts are
/// exact and coset tables can be computed exactly. `Unknown` makes the orbit
/// machinery watch for coincidences and log them as detected relations.
/// Discreteness itself is asserted by the user, never verified here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Presentation {
    Free,
    Unknown,
}

/// A finitely generated group of ball isometries given by explicit
/// generator matrices.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub name: String,
    pub dim: usize,
    pub presentation: Presentation,
    /// Generator names in index order (sorted at construction for
    /// deterministic indexing regardless of input order).
    pub generator_names: Vec<String>,
    pub generators: Vec<Isometry>,
    pub basepoint: BallPoint,
}

impl GroupSpec {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        presentation: Presentation,
        named_generators: Vec<(String, Isometry)>,
        basepoint: Option<BallPoint>,
    ) -> Result<Self, GroupError> {
        if named_generators.is_empty() {
            return Err(GroupError::InvalidSpec("at least one generator required".into()));
        }
        let mut named = named_generators;
        named.sort_by(|a, b| a.0.cmp(&b.0));
        for w in named.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GroupError::InvalidSpec(format!("duplicate generator name {}", w[0].0)));
            }
        }
        for (n, g) in &named {
            if g.dim() != dim {
                return Err(GroupError::InvalidSpec(format!(
                    "generator {n} has dimension {}, group has {dim}",
                    g.dim()
                )));
            }
        }
        for i in 0..named.len() {
            for j in (i + 1)..named.len() {
                if named[i].1.projective_dist(&named[j].1) <= 1e-12 {
                    return Err(GroupError::InvalidSpec(format!(
                        "generators {} and {} coincide as normalized matrices",
                        named[i].0, named[j].0
                    )));
                }
            }
        }
        let basepoint = basepoint.unwrap_or_else(|| BallPoint::origin(dim));
        if basepoint.dim() != dim {
            return Err(GroupError::InvalidSpec("basepoint dimension mismatch".into()));
        }
        let (generator_names, generators) = named.into_iter().unzip();
        Ok(Self { name: name.into(), dim, presentation, generator_names, generators, basepoint })
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// The isometry of a reduced word (left-to-right composition: the first
    /// letter acts last).
    pub fn word_isometry(&self, word: &Word) -> Isometry {
        let mut m = Isometry::identity(self.dim);
        for l in word.letters() {
            let g = &self.generators[l.generator()];
            let g = if l.is_inverse() { g.invert() } else { g.clone() };
            m = m.compose(&g);
        }
        m
    }

    /// Generator isometries indexed by letter rank: `a, a^-1, b, b^-1, ...`.
    pub fn letter_isometries(&self) -> Vec<Isometry> {
        let mut out = Vec::with_capacity(self.generators.len() * 2);
        for g in &self.generators {
            out.push(g.clone());
            out.push(g.invert());
        }
        out
    }

    pub fn model_map(&self) -> ModelMap {
        ModelMap::new(self.dim)
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generator_names.iter().position(|n| n == name)
    }
}

/// Applies a word to an interior half-space point one letter at a time
/// (innermost letter first). Each step goes through an exactly normalized
/// generator matrix, so heights and gaps keep full relative accuracy no
/// matter how long the word is; this is the required path for deep words,
/// where the composed matrix's determinant has drifted.
pub fn apply_word_h(letter_isos: &[Isometry], word: &Word, h: &HPoint) -> HPoint {
    let mut x = *h;
    for l in word.letters().iter().rev() {
        x = letter_isos[l.rank()].apply_h(&x);
    }
    x
}

/// Boundary image and boundary conformal factor of a word, accumulated
/// letter by letter along the orbit of `xi` (chain rule).
pub fn word_boundary_data(
    letter_isos: &[Isometry],
    word: &Word,
    xi: &crate::geometry::BoundaryPoint,
) -> Result<(crate::geometry::BoundaryPoint, f64), crate::error::GeomError> {
    let mut x = *xi;
    let mut factor = 1.0f64;
    for l in word.letters().iter().rev() {
        let g = &letter_isos[l.rank()];
        factor *= g.conformal_factor_boundary(&x)?;
        x = g.apply_boundary(&x);
    }
    Ok((x, factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BallPoint, BoundaryPoint};
    use crate::group::word::Letter;

    #[test]
    fn letterwise_application_matches_matrix_path_on_short_words() {
        let spec = GroupSpec::new(
            "f2",
            2,
            Presentation::Free,
            vec![
                ("a".into(), Isometry::axis_loxodromic(2, 1.3)),
                ("b".into(), Isometry::vertical_loxodromic(2, 0.9, 0.0)),
            ],
            None,
        )
        .unwrap();
        let letter_isos = spec.letter_isometries();
        let w = Word::from_letters([
            Letter::new(0, false),
            Letter::new(1, true),
            Letter::new(0, false),
            Letter::new(1, false),
        ]);
        let map = spec.model_map();
        let y = BallPoint::new(&[0.2, -0.1]).unwrap();
        let via_letters = map.to_ball(&apply_word_h(&letter_isos, &w, &map.to_half(&y)));
        let via_matrix = spec.word_isometry(&w).apply(&y).unwrap();
        assert!(via_letters.euclid_dist(&via_matrix) < 1e-12);

        let xi = BoundaryPoint::new(&[0.8, 0.6]).unwrap();
        let (img, factor) = word_boundary_data(&letter_isos, &w, &xi).unwrap();
        let g = spec.word_isometry(&w);
        assert!(img.euclid_dist(&g.apply_boundary(&xi)) < 1e-12);
        let direct = g.conformal_factor_boundary(&xi).unwrap();
        assert!((factor - direct).abs() <= 1e-11 * direct);
    }
}
