use std::collections::HashMap;

use crate::error::GroupError;

use super::enumerate::reduced_words;
use super::spec::{GroupSpec, Presentation};
use super::word::{Letter, Word};

/// Folded subgroup graph of a finitely generated subgroup of a free group.
///
/// Membership of a reduced word is decided by reading it from the base
/// vertex: the word lies in the subgroup exactly when the whole word can be
/// read and the walk returns to the base. Left cosets are classified by the
/// pair (vertex where the read of the inverted word stops, unread tail),
/// which identifies the vertex reached in the completed Schreier graph.
#[derive(Debug, Clone)]
pub struct SubgroupGraph {
    parent: Vec<u32>,
    edges: Vec<HashMap<u8, u32>>,
    base: u32,
}

impl SubgroupGraph {
    pub fn build(num_letter_ranks: usize, generators: &[Word]) -> Self {
        let _ = num_letter_ranks;
        let mut g = Self { parent: vec![0], edges: vec![HashMap::new()], base: 0 };
        for w in generators {
            if w.is_empty() {
                continue;
            }
            let letters = w.letters();
            let mut v = g.base;
            for (i, l) in letters.iter().enumerate() {
                let target = if i + 1 == letters.len() {
                    g.base
                } else {
                    g.fresh_vertex()
                };
                g.add_edge_pair(v, *l, target);
                v = target;
            }
        }
        g.fold();
        g
    }

    fn fresh_vertex(&mut self) -> u32 {
        let v = self.parent.len() as u32;
        self.parent.push(v);
        self.edges.push(HashMap::new());
        v
    }

    fn find(&self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            v = self.parent[v as usize];
        }
        v
    }

    fn add_edge_pair(&mut self, from: u32, l: Letter, to: u32) {
        self.edges[from as usize].insert(l.rank() as u8, to);
        self.edges[to as usize].insert(l.inverse().rank() as u8, from);
    }

    /// Stallings folding: while some vertex has two edges with the same
    /// label, identify their targets.
    fn fold(&mut self) {
        let mut queue: Vec<u32> = (0..self.parent.len() as u32).collect();
        while let Some(v) = queue.pop() {
            let v = self.find(v);
            let labels: Vec<u8> = self.edges[v as usize].keys().copied().collect();
            let mut resolved: HashMap<u8, u32> = HashMap::new();
            let mut merge: Option<(u32, u32)> = None;
            for l in labels {
                let t = self.find(self.edges[v as usize][&l]);
                if let Some(&prev) = resolved.get(&l) {
                    if prev != t {
                        merge = Some((prev, t));
                        break;
                    }
                } else {
                    resolved.insert(l, t);
                }
            }
            // Re-store resolved edges so stale union targets disappear.
            if merge.is_none() {
                self.edges[v as usize] = resolved.into_iter().map(|(l, t)| (l, t)).collect();
                continue;
            }
            let (a, b) = merge.unwrap();
            let (keep, drop) = if a < b { (a, b) } else { (b, a) };
            self.parent[drop as usize] = keep;
            let dropped: Vec<(u8, u32)> = self.edges[drop as usize].drain().collect();
            for (l, t) in dropped {
                self.edges[keep as usize].entry(l).or_insert(t);
            }
            // keep may now have duplicate labels through union; revisit both
            // it and v.
            queue.push(keep);
            queue.push(v);
        }
        self.base = self.find(self.base);
    }

    fn step(&self, v: u32, l: Letter) -> Option<u32> {
        self.edges[self.find(v) as usize]
            .get(&(l.rank() as u8))
            .map(|&t| self.find(t))
    }

    /// Reads as much of `letters` as possible from `base`; returns the stop
    /// vertex and the number of letters consumed.
    fn read(&self, letters: &[Letter]) -> (u32, usize) {
        let mut v = self.find(self.base);
        for (i, l) in letters.iter().enumerate() {
            match self.step(v, *l) {
                Some(t) => v = t,
                None => return (v, i),
            }
        }
        (v, letters.len())
    }

    /// Membership of a reduced word in the subgroup.
    pub fn contains(&self, w: &Word) -> bool {
        let (v, consumed) = self.read(w.letters());
        consumed == w.len() && v == self.find(self.base)
    }

    /// Canonical key of the left coset `w H`: the Schreier-graph vertex
    /// reached by reading `w^{-1}` (stop vertex in the core plus hanging
    /// tail).
    pub fn coset_key(&self, w: &Word) -> (u32, Vec<Letter>) {
        let inv = w.invert();
        let (v, consumed) = self.read(inv.letters());
        (v, inv.letters()[consumed..].to_vec())
    }
}

/// Whether coset identities were decided exactly or by matrix comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosetMode {
    Exact,
    Heuristic,
}

/// Shortlex-minimal representatives of the left cosets `w H` discovered
/// among reduced words of length at most `depth`.
#[derive(Debug, Clone)]
pub struct CosetTable {
    pub subgroup_gens: Vec<Word>,
    pub reps: Vec<Word>,
    pub mode: CosetMode,
    pub depth: usize,
    graph: Option<SubgroupGraph>,
}

impl CosetTable {
    /// Exact subgroup membership; `None` in heuristic mode.
    pub fn member(&self, w: &Word) -> Option<bool> {
        self.graph.as_ref().map(|g| g.contains(w))
    }

    /// Canonical key of the left coset of `w`; `None` in heuristic mode.
    pub fn key_of(&self, w: &Word) -> Option<(u32, Vec<Letter>)> {
        self.graph.as_ref().map(|g| g.coset_key(w))
    }

    pub fn is_exact(&self) -> bool {
        self.mode == CosetMode::Exact
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CosetParams {
    pub cap: u64,
    /// Enables matrix-comparison mode for non-free presentations: subgroup
    /// elements are enumerated to this depth and compared within `tol`.
    pub heuristic: Option<HeuristicParams>,
}

#[derive(Debug, Clone, Copy)]
pub struct HeuristicParams {
    pub subgroup_depth: usize,
    pub tol: f64,
}

impl Default for CosetParams {
    fn default() -> Self {
        Self { cap: super::enumerate::DEFAULT_WORD_CAP, heuristic: None }
    }
}

/// Enumerates coset representatives of `Gamma / <subgroup_gens>`.
pub fn cosets(
    spec: &GroupSpec,
    subgroup_gens: &[Word],
    depth: usize,
    params: &CosetParams,
) -> Result<CosetTable, GroupError> {
    match spec.presentation {
        Presentation::Free => cosets_exact(spec, subgroup_gens, depth, params.cap),
        Presentation::Unknown => match params.heuristic {
            Some(h) => cosets_heuristic(spec, subgroup_gens, depth, params.cap, h),
            None => Err(GroupError::HeuristicRequired),
        },
    }
}

fn cosets_exact(
    spec: &GroupSpec,
    subgroup_gens: &[Word],
    depth: usize,
    cap: u64,
) -> Result<CosetTable, GroupError> {
    let graph = SubgroupGraph::build(2 * spec.num_generators(), subgroup_gens);
    let words = reduced_words(spec.num_generators(), depth, cap)?;
    let mut seen: HashMap<(u32, Vec<Letter>), ()> = HashMap::new();
    let mut reps = Vec::new();
    for w in words {
        let key = graph.coset_key(&w);
        if seen.insert(key, ()).is_none() {
            reps.push(w);
        }
    }
    Ok(CosetTable {
        subgroup_gens: subgroup_gens.to_vec(),
        reps,
        mode: CosetMode::Exact,
        depth,
        graph: Some(graph),
    })
}

fn cosets_heuristic(
    spec: &GroupSpec,
    subgroup_gens: &[Word],
    depth: usize,
    cap: u64,
    h: HeuristicParams,
) -> Result<CosetTable, GroupError> {
    // Enumerate subgroup elements as free words in the subgroup generators
    // and remember their matrices.
    let sub_words = reduced_words(subgroup_gens.len().max(1), h.subgroup_depth, cap)?;
    let mut sub_isos = Vec::new();
    if subgroup_gens.is_empty() {
        sub_isos.push(spec.word_isometry(&Word::identity()));
    } else {
        for sw in sub_words {
            let mut expanded = Word::identity();
            for l in sw.letters() {
                let g = &subgroup_gens[l.generator()];
                let g = if l.is_inverse() { g.invert() } else { g.clone() };
                expanded = expanded.concat(&g);
            }
            sub_isos.push(spec.word_isometry(&expanded));
        }
    }

    let words = reduced_words(spec.num_generators(), depth, cap)?;
    let mut reps: Vec<Word> = Vec::new();
    let mut rep_isos: Vec<crate::geometry::Isometry> = Vec::new();
    for w in words {
        let wi = spec.word_isometry(&w);
        let mut found = false;
        'outer: for ri in &rep_isos {
            // w in r H  iff  r^{-1} w matches some subgroup element.
            let diff = ri.invert().compose(&wi);
            for si in &sub_isos {
                if diff.projective_dist(si) <= h.tol {
                    found = true;
                    break 'outer;
                }
            }
        }
        if !found {
            reps.push(w);
            rep_isos.push(wi);
        }
    }
    Ok(CosetTable {
        subgroup_gens: subgroup_gens.to_vec(),
        reps,
        mode: CosetMode::Heuristic,
        depth,
        graph: None,
    })
}
