//! Symmetric-group utilities: permutations, composition, the action on
//! words, and enumeration of `Σ(n)`.
//!
//! Convention (fixed project-wide and validated by brute-force action-law
//! tests): a permutation is stored one-line as `images[i] = p(i)` on
//! `0‥n-1`, and the action on a word `w` of length `n` is
//! `act(p, w)[i] = w[p(i)]`.  With composition `(p ∘ q)(i) = p(q(i))` this
//! makes `act(p ∘ q, w) = act(q, act(p, w))` — i.e. words carry a *right*
//! action, matching the right `Σ(n)`-actions on operad components.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A permutation of `{0, …, n-1}` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its one-line images; panics if the images
    /// are not a bijection.
    pub fn new(images: Vec<usize>) -> Self {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            assert!(i < n && !seen[i], "not a permutation: {images:?}");
            seen[i] = true;
        }
        Permutation { images }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// The transposition swapping `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Permutation { images }
    }

    /// All permutations of `{0, …, n-1}` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        permute_rec(&mut current, 0, &mut out);
        out.sort_by(|a, b| a.images.cmp(&b.images));
        out
    }
}

fn permute_rec(current: &mut Vec<usize>, k: usize, out: &mut Vec<Permutation>) {
    if k == current.len() {
        out.push(Permutation {
            images: current.clone(),
        });
        return;
    }
    for i in k..current.len() {
        current.swap(k, i);
        permute_rec(current, k + 1, out);
        current.swap(k, i);
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // One-line notation, 1-based for display.
        write!(f, "[")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "]")
    }
}

/// Group composition `(p ∘ q)(i) = p(q(i))`.
pub fn perm_compose(p: &Permutation, q: &Permutation) -> Permutation {
    assert_eq!(p.len(), q.len(), "composing permutations of different sizes");
    Permutation::new(q.images.iter().map(|&i| p.apply(i)).collect())
}

/// The action on words: `act(p, w)[i] = w[p(i)]`.
pub fn perm_act_word<T: Clone>(p: &Permutation, w: &[T]) -> Vec<T> {
    assert_eq!(p.len(), w.len(), "permutation size does not match word");
    p.images.iter().map(|&i| w[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_involution() {
        let id = Permutation::identity(3);
        let t = Permutation::transposition(3, 0, 1);
        assert_eq!(perm_compose(&id, &t), t);
        assert_eq!(perm_compose(&t, &t), id);
    }

    #[test]
    fn three_cycle_acts_as_declared() {
        // p = (0 1 2) as images [1, 2, 0]; acting on (x, y, z) picks
        // w[p(i)] per slot: (y, z, x).
        let p = Permutation::new(vec![1, 2, 0]);
        assert_eq!(perm_act_word(&p, &["x", "y", "z"]), vec!["y", "z", "x"]);
    }

    #[test]
    fn word_action_is_a_right_action() {
        // act(p ∘ q, w) = act(q, act(p, w)) brute-forced over Σ(3) × Σ(3).
        let w = ["a", "b", "c"];
        for p in Permutation::all(3) {
            for q in Permutation::all(3) {
                assert_eq!(
                    perm_act_word(&perm_compose(&p, &q), &w),
                    perm_act_word(&q, &perm_act_word(&p, &w))
                );
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(Permutation::all(0).len(), 1);
        assert_eq!(Permutation::all(4).len(), 24);
        // Lexicographic, distinct.
        let all = Permutation::all(3);
        for pair in all.windows(2) {
            assert!(pair[0].images() < pair[1].images());
        }
    }
}
