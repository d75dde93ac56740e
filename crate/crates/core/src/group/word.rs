use std::cmp::Ordering;
use std::fmt;

/// One letter of a reduced word: a generator index together with an
/// inversion flag. Letters order as `a < a^-1 < b < b^-1 < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        debug_assert!(generator < 128);
        Self((generator as u8) << 1 | inverse as u8)
    }

    pub fn from_rank(rank: usize) -> Self {
        Self(rank as u8)
    }

    pub fn generator(&self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(&self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(&self) -> Letter {
        Self(self.0 ^ 1)
    }

    /// Position in the canonical letter order, in `0..2k`.
    pub fn rank(&self) -> usize {
        self.0 as usize
    }
}

/// A reduced word in the generators: no letter is followed by its inverse.
/// The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn letter(generator: usize, inverse: bool) -> Self {
        Self(vec![Letter::new(generator, inverse)])
    }

    /// Builds a word from letters, cancelling adjacent inverse pairs.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Self(stack)
    }

    /// Raw constructor for letter sequences already known to be reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        Self(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Shortlex order: by length, then lexicographically by letter rank.
    pub fn cmp_shortlex(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    /// Renders against generator names, `"1"` for the identity.
    pub fn display(&self, names: &[String]) -> String {
        if self.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|l| {
                let n = &names[l.generator()];
                if l.is_inverse() {
                    format!("{n}^-1")
                } else {
                    n.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(".")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            let c = (b'a' + l.generator() as u8) as char;
            if l.is_inverse() {
                write!(f, "{}", c.to_ascii_uppercase())?;
            } else {
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduction_cancels() {
        let a = Letter::new(0, false);
        let ai = a.inverse();
        let b = Letter::new(1, false);
        let w = Word::from_letters([a, b, b.inverse(), ai, a]);
        assert_eq!(w.letters(), &[a]);
    }

    #[test]
    fn inverse_concat_is_identity() {
        let w = Word::from_letters([Letter::new(0, false), Letter::new(1, true), Letter::new(0, false)]);
        assert!(w.concat(&w.invert()).is_empty());
        assert!(w.invert().concat(&w).is_empty());
    }

    #[test]
    fn shortlex_ordering() {
        let a = Word::letter(0, false);
        let ai = Word::letter(0, true);
        let b = Word::letter(1, false);
        let aa = a.concat(&a);
        assert_eq!(a.cmp_shortlex(&ai), Ordering::Less);
        assert_eq!(ai.cmp_shortlex(&b), Ordering::Less);
        assert_eq!(b.cmp_shortlex(&aa), Ordering::Less);
    }

    proptest! {
        #[test]
        fn from_letters_always_reduced(ranks in prop::collection::vec(0usize..6, 0..40)) {
            let w = Word::from_letters(ranks.iter().map(|&r| Letter::from_rank(r)));
            prop_assert!(w.letters().windows(2).all(|p| p[0] != p[1].inverse()));
        }

        #[test]
        fn double_invert_is_identity_op(ranks in prop::collection::vec(0usize..6, 0..40)) {
            let w = Word::from_letters(ranks.iter().map(|&r| Letter::from_rank(r)));
            prop_assert_eq!(w.invert().invert(), w);
        }
    }
}
