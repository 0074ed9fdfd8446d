//! Free-Lie-algebra arithmetic: bracket trees, Lyndon words, and rewriting
//! to the Lyndon normal form.
//!
//! Elements of a free Lie algebra are represented as linear combinations of
//! binary bracket trees.  The canonical basis consists of the *standard
//! bracketings* of Lyndon words over the (totally ordered) leaf alphabet;
//! every tree rewrites into this basis by antisymmetry and the Jacobi
//! identity via the classical reduction: for canonical `p`, `q` with words
//! `u < v`, the bracket `[p, q]` is itself canonical when `p` is a letter or
//! the right factor of `p` is `≥ v`; otherwise `p = [p₁, p₂]` and
//! `[[p₁,p₂], q] = [p₁,[p₂,q]] − [p₂,[p₁,q]]` strictly decreases the left
//! argument.  The rewriting terminates and is confluent onto the Lyndon
//! basis.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{FieldTag, Scalar};

/// A binary bracket tree with named leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LieTree {
    Leaf(String),
    Node(Box<LieTree>, Box<LieTree>),
}

impl LieTree {
    pub fn leaf(name: &str) -> Self {
        LieTree::Leaf(name.to_string())
    }

    pub fn node(l: LieTree, r: LieTree) -> Self {
        LieTree::Node(Box::new(l), Box::new(r))
    }

    /// Leaves in left-to-right order.
    pub fn word(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_word(&mut out);
        out
    }

    fn collect_word(&self, out: &mut Vec<String>) {
        match self {
            LieTree::Leaf(s) => out.push(s.clone()),
            LieTree::Node(l, r) => {
                l.collect_word(out);
                r.collect_word(out);
            }
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            LieTree::Leaf(_) => 1,
            LieTree::Node(l, r) => l.arity() + r.arity(),
        }
    }

    /// Replaces every leaf through `f` (leaf renaming / substitution of
    /// leaves by leaves).
    pub fn map_leaves(&self, f: &impl Fn(&str) -> String) -> LieTree {
        match self {
            LieTree::Leaf(s) => LieTree::Leaf(f(s)),
            LieTree::Node(l, r) => LieTree::node(l.map_leaves(f), r.map_leaves(f)),
        }
    }

    /// The bracketing shape with leaves erased, e.g. `(.(..))` — used to
    /// encode canonical trees as operad/term symbols.
    pub fn shape(&self) -> String {
        match self {
            LieTree::Leaf(_) => ".".to_string(),
            LieTree::Node(l, r) => format!("({}{})", l.shape(), r.shape()),
        }
    }

    /// Rebuilds a tree from a shape string and the leaf word, inverse to
    /// [`LieTree::shape`] + [`LieTree::word`].
    pub fn from_shape(shape: &str, word: &[String]) -> Option<LieTree> {
        let mut chars = shape.chars();
        let mut leaves = word.iter();
        let t = parse_shape(&mut chars, &mut leaves)?;
        if chars.next().is_some() || leaves.next().is_some() {
            return None;
        }
        Some(t)
    }
}

fn parse_shape<'a>(
    chars: &mut impl Iterator<Item = char>,
    leaves: &mut impl Iterator<Item = &'a String>,
) -> Option<LieTree> {
    match chars.next()? {
        '.' => Some(LieTree::Leaf(leaves.next()?.clone())),
        '(' => {
            let l = parse_shape(chars, leaves)?;
            let r = parse_shape(chars, leaves)?;
            if chars.next()? != ')' {
                return None;
            }
            Some(LieTree::node(l, r))
        }
        _ => None,
    }
}

impl fmt::Display for LieTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieTree::Leaf(s) => write!(f, "{s}"),
            LieTree::Node(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

/// A finite linear combination of bracket trees.
pub type LieComb = BTreeMap<LieTree, Scalar>;

fn add_term(comb: &mut LieComb, t: LieTree, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    match comb.get_mut(&t) {
        Some(existing) => {
            let sum = &*existing + c;
            if sum.is_zero() {
                comb.remove(&t);
            } else {
                *existing = sum;
            }
        }
        None => {
            comb.insert(t, c.clone());
        }
    }
}

/// Is `w` (as ranks) a Lyndon word: strictly smaller than each proper suffix?
pub fn is_lyndon(w: &[usize]) -> bool {
    if w.is_empty() {
        return false;
    }
    (1..w.len()).all(|i| w < &w[i..])
}

/// Standard factorization of a Lyndon word of length ≥ 2: `w = u·v` with `v`
/// the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[usize]) -> (usize, usize) {
    debug_assert!(is_lyndon(w) && w.len() >= 2);
    let split = (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .expect("Lyndon word has a Lyndon proper suffix");
    (split, w.len())
}

/// The standard (Lyndon) bracketing of a Lyndon word given as leaf names
/// plus their ranks.
pub fn standard_bracketing(names: &[String], ranks: &[usize]) -> LieTree {
    debug_assert_eq!(names.len(), ranks.len());
    if names.len() == 1 {
        return LieTree::Leaf(names[0].clone());
    }
    let (split, _) = standard_factorization(ranks);
    LieTree::node(
        standard_bracketing(&names[..split], &ranks[..split]),
        standard_bracketing(&names[split..], &ranks[split..]),
    )
}

/// Rewrites a bracket tree into the Lyndon basis determined by the leaf
/// order `rank`.
pub fn normalize(t: &LieTree, rank: &impl Fn(&str) -> usize, tag: FieldTag) -> LieComb {
    match t {
        LieTree::Leaf(_) => {
            let mut out = LieComb::new();
            add_term(&mut out, t.clone(), &Scalar::one(tag));
            out
        }
        LieTree::Node(l, r) => {
            let nl = normalize(l, rank, tag);
            let nr = normalize(r, rank, tag);
            let mut out = LieComb::new();
            for (p, cp) in &nl {
                for (q, cq) in &nr {
                    let c = cp * cq;
                    for (t2, c2) in reduce_pair(p, q, rank, tag) {
                        add_term(&mut out, t2, &(&c * &c2));
                    }
                }
            }
            out
        }
    }
}

/// Reduces the bracket `[p, q]` of two canonical trees to the Lyndon basis.
fn reduce_pair(p: &LieTree, q: &LieTree, rank: &impl Fn(&str) -> usize, tag: FieldTag) -> LieComb {
    let mut out = LieComb::new();
    if p == q {
        return out; // [t, t] = 0
    }
    let ranks = |t: &LieTree| -> Vec<usize> { t.word().iter().map(|s| rank(s)).collect() };
    let u = ranks(p);
    let v = ranks(q);
    if u > v {
        // Antisymmetry: [p, q] = -[q, p].
        for (t, c) in reduce_pair(q, p, rank, tag) {
            add_term(&mut out, t, &-&c);
        }
        return out;
    }
    if u == v {
        // Equal words with canonical trees means equal trees, handled above;
        // distinct canonical trees cannot share a word.
        unreachable!("distinct canonical Lyndon trees with equal words");
    }
    // u < v from here on.
    let standard = match p {
        LieTree::Leaf(_) => true,
        LieTree::Node(_, p2) => ranks(p2) >= v,
    };
    if standard {
        add_term(&mut out, LieTree::node(p.clone(), q.clone()), &Scalar::one(tag));
        return out;
    }
    // Jacobi: [[p₁,p₂], q] = [p₁,[p₂,q]] − [p₂,[p₁,q]].
    let LieTree::Node(p1, p2) = p else { unreachable!() };
    for (t, c) in reduce_pair(p2, q, rank, tag) {
        for (t2, c2) in reduce_pair(p1, &t, rank, tag) {
            add_term(&mut out, t2, &(&c * &c2));
        }
    }
    for (t, c) in reduce_pair(p1, q, rank, tag) {
        for (t2, c2) in reduce_pair(p2, &t, rank, tag) {
            add_term(&mut out, t2, &-&(&c * &c2));
        }
    }
    out
}

/// All Lyndon words of length `n` over ranks `0‥k` (lexicographic order),
/// via Duval's generation algorithm.
pub fn lyndon_words(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || n == 0 {
        return out;
    }
    let mut w = vec![0usize];
    loop {
        if w.len() == n {
            out.push(w.clone());
        }
        // Extend periodically to length n, then increment.
        let m = w.len();
        while w.len() < n {
            let x = w[w.len() % m];
            w.push(x);
        }
        while let Some(&last) = w.last() {
            if last == k - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            None => break,
            Some(last) => *last += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldTag;

    fn rank_abc(s: &str) -> usize {
        match s {
            "a" => 0,
            "b" => 1,
            "c" => 2,
            _ => panic!("unknown leaf"),
        }
    }

    fn q() -> FieldTag {
        FieldTag::Q
    }

    fn leaf(s: &str) -> LieTree {
        LieTree::leaf(s)
    }

    #[test]
    fn antisymmetry_and_self_bracket() {
        let ab = LieTree::node(leaf("a"), leaf("b"));
        let ba = LieTree::node(leaf("b"), leaf("a"));
        let aa = LieTree::node(leaf("a"), leaf("a"));
        assert!(normalize(&aa, &rank_abc, q()).is_empty());
        let n_ab = normalize(&ab, &rank_abc, q());
        let n_ba = normalize(&ba, &rank_abc, q());
        assert_eq!(n_ab.len(), 1);
        assert_eq!(n_ab.get(&ab), Some(&Scalar::one(q())));
        assert_eq!(n_ba.get(&ab), Some(&-&Scalar::one(q())));
    }

    #[test]
    fn jacobi_rewrites_to_zero() {
        // [[a,b],c] - [a,[b,c]] + [b,[a,c]] = 0.
        let t1 = LieTree::node(LieTree::node(leaf("a"), leaf("b")), leaf("c"));
        let t2 = LieTree::node(leaf("a"), LieTree::node(leaf("b"), leaf("c")));
        let t3 = LieTree::node(leaf("b"), LieTree::node(leaf("a"), leaf("c")));
        let mut total = LieComb::new();
        for (t, sign) in [(t1, 1i64), (t2, -1), (t3, 1)] {
            for (tree, c) in normalize(&t, &rank_abc, q()) {
                add_term(
                    &mut total,
                    tree,
                    &(&c * &Scalar::from_int(sign, q())),
                );
            }
        }
        assert!(total.is_empty());
    }

    #[test]
    fn normal_form_is_idempotent() {
        let t = LieTree::node(
            LieTree::node(leaf("c"), leaf("a")),
            LieTree::node(leaf("b"), leaf("a")),
        );
        let n = normalize(&t, &rank_abc, q());
        for tree in n.keys() {
            let renorm = normalize(tree, &rank_abc, q());
            assert_eq!(renorm.len(), 1);
            assert_eq!(renorm.get(tree), Some(&Scalar::one(q())));
        }
    }

    #[test]
    fn lyndon_word_counts() {
        // Over a 2-letter alphabet: 2, 1, 2, 3, 6 Lyndon words of lengths
        // 1..=5 (classical necklace counts).
        assert_eq!(lyndon_words(2, 1).len(), 2);
        assert_eq!(lyndon_words(2, 2).len(), 1);
        assert_eq!(lyndon_words(2, 3).len(), 2);
        assert_eq!(lyndon_words(2, 4).len(), 3);
        assert_eq!(lyndon_words(2, 5).len(), 6);
        for w in lyndon_words(3, 4) {
            assert!(is_lyndon(&w));
        }
    }

    #[test]
    fn multilinear_dimension_is_factorial() {
        // The multilinear Lyndon words on n distinct letters are those
        // starting with the smallest letter: (n-1)! of them.
        for n in 1..=5usize {
            let perms = crate::perm::Permutation::all(n);
            let count = perms
                .iter()
                .filter(|p| is_lyndon(p.images()))
                .count();
            let expected: usize = (1..n).product();
            assert_eq!(count, expected);
        }
    }

    #[test]
    fn shape_round_trip() {
        let t = LieTree::node(leaf("a"), LieTree::node(leaf("b"), leaf("c")));
        let shape = t.shape();
        assert_eq!(shape, "(.(..))");
        let back = LieTree::from_shape(&shape, &t.word()).unwrap();
        assert_eq!(back, t);
    }
}
