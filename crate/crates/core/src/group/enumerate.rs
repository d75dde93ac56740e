use num_complex::Complex64;

use crate::error::GroupError;
use crate::geometry::{HPoint, Isometry};

use super::spec::GroupSpec;
use super::word::{Letter, Word};

/// Default cap on the number of words one enumeration may visit.
pub const DEFAULT_WORD_CAP: u64 = 10_000_000;

/// Number of reduced words of length exactly `len` over `num_gens` free
/// generators: `2k (2k-1)^(len-1)`, and 1 for the empty word.
pub fn free_word_count_at(num_gens: usize, len: usize) -> u128 {
    let k2 = 2 * num_gens as u128;
    match len {
        0 => 1,
        _ => k2 * (k2 - 1).pow(len as u32 - 1),
    }
}

/// Number of reduced words of length at most `depth`.
pub fn free_word_count(num_gens: usize, depth: usize) -> u128 {
    (0..=depth).map(|l| free_word_count_at(num_gens, l)).sum()
}

/// A node of the reduced-word tree during enumeration.
///
/// Words grow by prepending letters, so the image of the basepoint updates
/// by one application of a generator matrix per step: heights stay
/// multiplicative and keep full relative accuracy at any depth. The raw
/// matrix product is carried along for projective uses (fixed points,
/// relation detection); its determinant drifts like `norm^2 * eps` on very
/// long words, so interior actions must not be derived from it.
pub struct NodeView<'a> {
    /// Letters of the word in reverse order (`letters_rev[0]` is the last
    /// letter of the word).
    pub letters_rev: &'a [Letter],
    pub matrix: &'a [Complex64; 4],
    pub image: &'a HPoint,
}

impl<'a> NodeView<'a> {
    pub fn len(&self) -> usize {
        self.letters_rev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters_rev.is_empty()
    }

    pub fn word(&self) -> Word {
        Word::from_reduced(self.letters_rev.iter().rev().copied().collect())
    }
}

/// Enumerates all reduced words of length at most `depth`, visiting each
/// exactly once with the image of `basepoint_h` under the word's isometry.
///
/// The tree is split by the word's last letter into `2k` subtrees; each is
/// walked depth-first, sequentially and independently of the others, so the
/// per-subtree visit sequence (and every float computed along it) does not
/// depend on how subtrees are assigned to worker threads. Returned states
/// are ordered: index 0 saw only the empty word, index `1 + r` the subtree
/// of the rank-`r` letter. Visit order is NOT the canonical (length, lex)
/// order; consumers that need it sort per length afterwards.
pub fn enumerate_with<S, MS, F>(
    spec: &GroupSpec,
    basepoint_h: &HPoint,
    depth: usize,
    cap: u64,
    workers: usize,
    make_state: MS,
    visit: F,
) -> Result<Vec<S>, GroupError>
where
    S: Send,
    MS: Fn(usize) -> S + Sync,
    F: Fn(&mut S, NodeView<'_>) + Sync,
{
    let needed = free_word_count(spec.num_generators(), depth);
    if needed > cap as u128 {
        return Err(GroupError::BudgetExceeded {
            needed: needed.min(u64::MAX as u128) as u64,
            cap,
        });
    }

    let letter_isos = spec.letter_isometries();
    let nl = letter_isos.len();
    let identity = Isometry::identity(spec.dim);

    let mut root_state = make_state(0);
    visit(
        &mut root_state,
        NodeView { letters_rev: &[], matrix: identity.matrix(), image: basepoint_h },
    );
    if depth == 0 {
        return Ok(vec![root_state]);
    }

    let nthreads = workers.max(1).min(nl);
    let mut collected: Vec<(usize, S)> = Vec::with_capacity(nl);
    if nthreads <= 1 {
        for rank in 0..nl {
            collected.push((rank, run_subtree(basepoint_h, depth, rank, &letter_isos, &make_state, &visit)));
        }
    } else {
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for tid in 0..nthreads {
                let letter_isos = &letter_isos;
                let make_state = &make_state;
                let visit = &visit;
                handles.push(scope.spawn(move || {
                    let mut out = Vec::new();
                    let mut rank = tid;
                    while rank < nl {
                        out.push((
                            rank,
                            run_subtree(basepoint_h, depth, rank, letter_isos, make_state, visit),
                        ));
                        rank += nthreads;
                    }
                    out
                }));
            }
            for h in handles {
                collected.extend(h.join().expect("enumeration worker panicked"));
            }
        });
    }
    collected.sort_by_key(|(rank, _)| *rank);

    let mut states = Vec::with_capacity(nl + 1);
    states.push(root_state);
    states.extend(collected.into_iter().map(|(_, s)| s));
    Ok(states)
}

fn mat_mul(a: &[Complex64; 4], b: &[Complex64; 4]) -> [Complex64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn run_subtree<S, MS, F>(
    basepoint_h: &HPoint,
    depth: usize,
    first_rank: usize,
    letter_isos: &[Isometry],
    make_state: &MS,
    visit: &F,
) -> S
where
    MS: Fn(usize) -> S + Sync,
    F: Fn(&mut S, NodeView<'_>) + Sync,
{
    let mut state = make_state(1 + first_rank);
    let mut letters_rev = vec![Letter::from_rank(first_rank)];
    let iso = &letter_isos[first_rank];
    let matrix = *iso.matrix();
    let image = iso.apply_h(basepoint_h);
    visit(&mut state, NodeView { letters_rev: &letters_rev, matrix: &matrix, image: &image });
    dfs(&mut state, &mut letters_rev, &matrix, &image, depth, letter_isos, visit);
    state
}

fn dfs<S, F>(
    state: &mut S,
    letters_rev: &mut Vec<Letter>,
    matrix: &[Complex64; 4],
    image: &HPoint,
    depth: usize,
    letter_isos: &[Isometry],
    visit: &F,
) where
    F: Fn(&mut S, NodeView<'_>) + Sync,
{
    if letters_rev.len() >= depth {
        return;
    }
    // Prepending `l` to a word whose first letter is `first` stays reduced
    // when l != first^{-1}.
    let first = *letters_rev.last().expect("dfs starts below the root");
    for rank in 0..letter_isos.len() {
        let letter = Letter::from_rank(rank);
        if letter == first.inverse() {
            continue;
        }
        let child_iso = &letter_isos[rank];
        let child_matrix = mat_mul(child_iso.matrix(), matrix);
        let child_image = child_iso.apply_h(image);
        letters_rev.push(letter);
        visit(state, NodeView { letters_rev, matrix: &child_matrix, image: &child_image });
        dfs(state, letters_rev, &child_matrix, &child_image, depth, letter_isos, visit);
        letters_rev.pop();
    }
}

/// All reduced words of length at most `depth` in canonical (length, lex)
/// order, without any geometry.
pub fn reduced_words(num_gens: usize, depth: usize, cap: u64) -> Result<Vec<Word>, GroupError> {
    let needed = free_word_count(num_gens, depth);
    if needed > cap as u128 {
        return Err(GroupError::BudgetExceeded { needed: needed.min(u64::MAX as u128) as u64, cap });
    }
    let mut by_len: Vec<Vec<Word>> = vec![Vec::new(); depth + 1];
    by_len[0].push(Word::identity());
    if depth >= 1 {
        let mut stack: Vec<Letter> = Vec::new();
        for rank in 0..2 * num_gens {
            stack.push(Letter::from_rank(rank));
            words_dfs(&mut stack, num_gens, depth, &mut by_len);
            stack.pop();
        }
    }
    Ok(by_len.into_iter().flatten().collect())
}

fn words_dfs(stack: &mut Vec<Letter>, num_gens: usize, depth: usize, by_len: &mut [Vec<Word>]) {
    by_len[stack.len()].push(Word::from_reduced(stack.clone()));
    if stack.len() >= depth {
        return;
    }
    let last = *stack.last().unwrap();
    for rank in 0..2 * num_gens {
        let letter = Letter::from_rank(rank);
        if letter == last.inverse() {
            continue;
        }
        stack.push(letter);
        words_dfs(stack, num_gens, depth, by_len);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_counts_closed_form() {
        assert_eq!(free_word_count(2, 0), 1);
        assert_eq!(free_word_count(2, 3), 1 + 4 + 12 + 36);
        assert_eq!(free_word_count(3, 2), 1 + 6 + 30);
        for depth in 0..=10 {
            for k in [2usize, 3] {
                let n = free_word_count(k, depth);
                let listed = reduced_words(k, depth, u64::MAX).unwrap().len() as u128;
                assert_eq!(n, listed, "k={k} depth={depth}");
            }
        }
    }

    #[test]
    fn words_are_shortlex_sorted_and_reduced() {
        let words = reduced_words(2, 4, u64::MAX).unwrap();
        for w in &words {
            assert!(w.letters().windows(2).all(|p| p[0] != p[1].inverse()));
        }
        for pair in words.windows(2) {
            assert_eq!(pair[0].cmp_shortlex(&pair[1]), std::cmp::Ordering::Less);
        }
        assert_eq!(words[0], Word::identity());
    }

    #[test]
    fn budget_rejected_deterministically() {
        let err = reduced_words(2, 20, 1000).unwrap_err();
        assert!(matches!(err, GroupError::BudgetExceeded { .. }));
    }

    #[test]
    fn node_word_reverses_prepend_stack() {
        use crate::geometry::BallPoint;
        use crate::group::spec::Presentation;
        let spec = GroupSpec::new(
            "f2",
            2,
            Presentation::Free,
            vec![
                ("a".into(), Isometry::axis_loxodromic(2, 1.0)),
                ("b".into(), Isometry::vertical_loxodromic(2, 1.0, 0.0)),
            ],
            None,
        )
        .unwrap();
        let map = spec.model_map();
        let y = BallPoint::new(&[0.1, 0.2]).unwrap();
        let y_h = map.to_half(&y);
        let states = enumerate_with(
            &spec,
            &y_h,
            3,
            u64::MAX,
            1,
            |_| Vec::new(),
            |out: &mut Vec<(Word, HPoint)>, node| out.push((node.word(), *node.image)),
        )
        .unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut count = 0;
        for (w, img) in states.iter().flatten() {
            count += 1;
            assert!(seen.insert(w.clone()), "duplicate word {w}");
            // Image matches the word's isometry applied to y.
            let expect = spec.word_isometry(w).apply(&y).unwrap();
            let got = map.to_ball(img);
            assert!(expect.euclid_dist(&got) < 1e-10, "word {w}");
        }
        assert_eq!(count, free_word_count(2, 3) as usize);
    }
}
