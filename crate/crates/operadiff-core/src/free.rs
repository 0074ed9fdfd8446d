//! The free `P`-algebra monad `S(P,−)`: canonical orbit normal forms, the
//! unit `η`, multiplication `γ`, functorial action, the differential
//! combinator transformation `∂`, the distributive law `λ`, the D-linear
//! counit, and the DC / tangent-monad axiom suites.
//!
//! Elements of `S(P,V) = ⊕ₙ (P(n) ⊗ V^⊗n)_{Σ(n)}` are stored as linear
//! combinations of canonical terms `(op; v₁,…,vₙ)`.  The canonical `op` code
//! depends on the operad: `Com` uses `c{n}` with a sorted word, `Ass`
//! reduces the operad part to the identity permutation (plain tensor
//! words), `Lie` stores the bracketing shape of a Lyndon-canonical tree,
//! `A•` stores the algebra basis symbol, and table operads reduce into a
//! deterministic echelon normal form of the orbit relations.
//!
//! Variable alphabets are plain strings ordered lexicographically; product
//! modules tag their symbols (`0#x`, `1#x`), and nested free algebras use
//! JSON-encoded terms as variables.  All orderings derive from the global
//! string order, so canonical forms are stable across calls.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;

use crate::lie::{self, LieTree};
use crate::linalg::{echelon_basis, reduce_mod, BasedModule, LinearMap, Vector};
use crate::operad::{
    ass_perm, ass_symbol, complete_compose, lc_symbol_tree, Operad,
    OperadElement,
};
use crate::perm::{perm_act_word, Permutation};
use rand::Rng as _;
use crate::report::Report;
use crate::scalar::Scalar;

/// One canonical term `(op; word)` of a free algebra.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct FreeTerm {
    pub op: String,
    pub word: Vec<String>,
}

impl FreeTerm {
    pub fn new(op: &str, word: &[&str]) -> Self {
        FreeTerm {
            op: op.to_string(),
            word: word.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.word.len()
    }
}

impl fmt::Display for FreeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.op, self.word.join(","))
    }
}

/// An element of `S(P, V)`: a finite combination of canonical terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeElement {
    pub terms: BTreeMap<FreeTerm, Scalar>,
}

impl FreeElement {
    pub fn zero() -> Self {
        FreeElement::default()
    }

    pub fn single(term: FreeTerm, c: Scalar) -> Self {
        let mut el = FreeElement::zero();
        el.add_term(term, &c);
        el
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, term: FreeTerm, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&term) {
            Some(existing) => {
                let sum = &*existing + c;
                if sum.is_zero() {
                    self.terms.remove(&term);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(term, c.clone());
            }
        }
    }

    pub fn add(&self, other: &FreeElement) -> FreeElement {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> FreeElement {
        FreeElement {
            terms: self.terms.iter().map(|(t, c)| (t.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &FreeElement) -> FreeElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> FreeElement {
        if c.is_zero() {
            return FreeElement::zero();
        }
        FreeElement {
            terms: self
                .terms
                .iter()
                .map(|(t, k)| (t.clone(), k * c))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FreeTerm, &Scalar)> {
        self.terms.iter()
    }

    /// The element as a sparse vector over JSON term symbols.
    pub fn to_vector(&self) -> Vector {
        let mut v = Vector::zero();
        for (t, c) in &self.terms {
            v.add_term(&term_symbol(t), c);
        }
        v
    }

    /// Rebuilds an element from a sparse vector over term symbols.
    pub fn from_vector(v: &Vector) -> FreeElement {
        let mut el = FreeElement::zero();
        for (s, c) in v.iter() {
            el.add_term(term_from_symbol(s), c);
        }
        el
    }
}

impl fmt::Display for FreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{t}")?;
            } else {
                write!(f, "{c}·{t}")?;
            }
        }
        Ok(())
    }
}

/// Injective, decodable symbol for a term — used as a variable name of a
/// nested free algebra `S(S(V))` and as a basis symbol of [`free_module`].
pub fn term_symbol(t: &FreeTerm) -> String {
    serde_json::to_string(&(&t.op, &t.word)).expect("term serializes")
}

/// Inverse of [`term_symbol`].
pub fn term_from_symbol(s: &str) -> FreeTerm {
    let (op, word): (String, Vec<String>) =
        serde_json::from_str(s).expect("valid term symbol");
    FreeTerm { op, word }
}

/// Lexicographic ranks of the distinct letters of `word` — the global
/// string order restricted to the letters at hand, which is all the Lie
/// rewriting engine needs for a stable canonical form.
fn lex_ranks(word: &[String]) -> BTreeMap<String, usize> {
    let mut sorted: Vec<&String> = word.iter().collect();
    sorted.sort();
    sorted.dedup();
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect()
}

fn normalize_tree(op: &Operad, tree: &LieTree) -> FreeElement {
    let ranks = lex_ranks(&tree.word());
    let comb = lie::normalize(tree, &|s: &str| ranks[s], op.tag);
    let mut out = FreeElement::zero();
    for (t, c) in comb {
        out.add_term(
            FreeTerm {
                op: t.shape(),
                word: t.word(),
            },
            &c,
        );
    }
    out
}

fn ass_id(n: usize) -> String {
    ass_symbol(&Permutation::identity(n))
}

/// Canonical form of a single raw pair `(basis symbol; word)`.
fn canonical_from_basis(op: &Operad, sym: &str, word: &[String]) -> FreeElement {
    let one = Scalar::one(op.tag);
    if op.is_com() {
        let mut w = word.to_vec();
        w.sort();
        return FreeElement::single(
            FreeTerm {
                op: format!("c{}", w.len()),
                word: w,
            },
            one,
        );
    }
    if op.is_ass() {
        let sigma = ass_perm(sym);
        assert_eq!(sigma.len(), word.len(), "arity mismatch");
        let w = perm_act_word(&sigma.inverse(), word);
        return FreeElement::single(
            FreeTerm {
                op: ass_id(w.len()),
                word: w,
            },
            one,
        );
    }
    if op.is_lie() {
        let tree = lc_symbol_tree(sym)
            .map_leaves(&|s| word[s.parse::<usize>().expect("position leaf")].clone());
        return normalize_tree(op, &tree);
    }
    if op.is_pointed() {
        assert_eq!(word.len(), 1, "pointed operads live in arity 1");
        return FreeElement::single(
            FreeTerm {
                op: sym.to_string(),
                word: word.to_vec(),
            },
            one,
        );
    }
    canonical_table(op, &Vector::term(sym, one), word)
}

/// Generic orbit reduction for table operads: quotient the sector spanned
/// by `P(n) ⊗ {arrangements of word}` by the diagonal-action relations and
/// reduce into the echelon normal form.
fn canonical_table(op: &Operad, mu: &Vector, word: &[String]) -> FreeElement {
    let n = word.len();
    assert!(n <= 8, "generic canonicalization capped at arity 8");
    let comp = op.component(n);
    let mut sorted = word.to_vec();
    sorted.sort();
    let arrangements: Vec<Vec<String>> = sorted
        .iter()
        .cloned()
        .permutations(n)
        .unique()
        .collect();
    let pair_sym = |s: &str, w: &[String]| -> String {
        serde_json::to_string(&(s, w)).expect("pair serializes")
    };
    let mut ambient_syms = Vec::new();
    for s in comp.basis() {
        for w in &arrangements {
            ambient_syms.push(pair_sym(s, w));
        }
    }
    let ambient = BasedModule::new(ambient_syms, op.tag);
    // Orbit relations for the adjacent-transposition generators.
    let mut relations = Vec::new();
    for j in 0..n.saturating_sub(1) {
        let tau = Permutation::transposition(n, j, j + 1);
        for s in comp.basis() {
            for w in &arrangements {
                let acted = crate::operad::sigma_act(
                    op,
                    &OperadElement {
                        arity: n,
                        vec: comp.gen(s),
                    },
                    &tau,
                );
                let moved = perm_act_word(&tau, w);
                let mut rel = ambient.gen(&pair_sym(s, w));
                for (t, c) in acted.vec.iter() {
                    rel.add_term(&pair_sym(t, &moved), &-c);
                }
                relations.push(rel);
            }
        }
    }
    let ech = echelon_basis(&ambient, &relations);
    let mut raw = Vector::zero();
    for (s, c) in mu.iter() {
        raw.add_term(&pair_sym(s, word), c);
    }
    let reduced = reduce_mod(&ambient, &ech, &raw);
    let mut out = FreeElement::zero();
    for (s, c) in reduced.iter() {
        let (sym, w): (String, Vec<String>) = serde_json::from_str(s).unwrap();
        out.add_term(FreeTerm { op: sym, word: w }, c);
    }
    out
}

/// Canonicalizes `(op_el; word)` — the class of the pure tensor under the
/// diagonal `Σ(n)`-action — extended linearly over `op_el`.
pub fn canonicalize(op: &Operad, op_el: &OperadElement, word: &[String]) -> FreeElement {
    assert_eq!(op_el.arity, word.len(), "arity mismatch");
    let mut out = FreeElement::zero();
    for (sym, c) in op_el.vec.iter() {
        out = out.add(&canonical_from_basis(op, sym, word).scale(c));
    }
    out
}

/// Re-canonicalizes a term whose `op` code is already canonical but whose
/// word has been rewritten (by a substitution of letters).
fn recanon(op: &Operad, opcode: &str, word: &[String]) -> FreeElement {
    let one = Scalar::one(op.tag);
    if op.is_com() {
        let mut w = word.to_vec();
        w.sort();
        return FreeElement::single(
            FreeTerm {
                op: opcode.to_string(),
                word: w,
            },
            one,
        );
    }
    if op.is_ass() || op.is_pointed() {
        return FreeElement::single(
            FreeTerm {
                op: opcode.to_string(),
                word: word.to_vec(),
            },
            one,
        );
    }
    if op.is_lie() {
        let tree = LieTree::from_shape(opcode, word).expect("canonical shape");
        return normalize_tree(op, &tree);
    }
    canonical_table(op, &op.component(word.len()).gen(opcode), word)
}

/// The monad unit `η(v) = (1_P; v)`, extended linearly over `v`.
pub fn monad_unit(op: &Operad, v: &Vector) -> FreeElement {
    let mut out = FreeElement::zero();
    for (sym, c) in v.iter() {
        out = out.add(&canonicalize(op, &op.unit(), std::slice::from_ref(sym)).scale(c));
    }
    out
}

/// `γ(outer; t₁,…,tₙ)` for a single canonical outer term with canonical
/// argument terms — the operadic substitution.
fn compose_term(op: &Operad, outer: &FreeTerm, args: &[&FreeTerm]) -> FreeElement {
    assert_eq!(outer.arity(), args.len(), "argument count mismatch");
    let one = Scalar::one(op.tag);
    if op.is_com() {
        let mut word: Vec<String> = args.iter().flat_map(|t| t.word.clone()).collect();
        word.sort();
        return FreeElement::single(
            FreeTerm {
                op: format!("c{}", word.len()),
                word,
            },
            one,
        );
    }
    if op.is_ass() {
        let word: Vec<String> = args.iter().flat_map(|t| t.word.clone()).collect();
        return FreeElement::single(
            FreeTerm {
                op: ass_id(word.len()),
                word,
            },
            one,
        );
    }
    if op.is_lie() {
        // Substitute the argument trees into the leaves of the outer shape.
        let placeholders: Vec<String> = (0..outer.arity()).map(|i| i.to_string()).collect();
        let skeleton = LieTree::from_shape(&outer.op, &placeholders).expect("canonical shape");
        let arg_trees: Vec<LieTree> = args
            .iter()
            .map(|t| LieTree::from_shape(&t.op, &t.word).expect("canonical shape"))
            .collect();
        let tree = substitute(&skeleton, &arg_trees);
        return normalize_tree(op, &tree);
    }
    if op.is_pointed() {
        let a = op.pointed_algebra().unwrap();
        let prod = a.product(
            &Vector::term(&outer.op, one.clone()),
            &Vector::term(&args[0].op, one),
        );
        let mut out = FreeElement::zero();
        for (sym, c) in prod.iter() {
            out.add_term(
                FreeTerm {
                    op: sym.clone(),
                    word: args[0].word.clone(),
                },
                c,
            );
        }
        return out;
    }
    // Table operads: genuine operad-level complete composition.
    let mu = OperadElement {
        arity: outer.arity(),
        vec: op.component(outer.arity()).gen(&outer.op),
    };
    let nus: Vec<OperadElement> = args
        .iter()
        .map(|t| OperadElement {
            arity: t.arity(),
            vec: op.component(t.arity()).gen(&t.op),
        })
        .collect();
    let composed = complete_compose(op, &mu, &nus);
    let word: Vec<String> = args.iter().flat_map(|t| t.word.clone()).collect();
    canonicalize(op, &composed, &word)
}

fn substitute(t: &LieTree, args: &[LieTree]) -> LieTree {
    match t {
        LieTree::Leaf(s) => args[s.parse::<usize>().expect("placeholder leaf")].clone(),
        LieTree::Node(l, r) => LieTree::node(substitute(l, args), substitute(r, args)),
    }
}

/// The Kleisli extension: substitutes `f(letter)` for every letter of every
/// term — `γ ∘ S(f)` for a `FreeElement`-valued `f`.  This one primitive
/// subsumes the functor action, the monad multiplication, and evaluation.
pub fn bind(
    op: &Operad,
    el: &FreeElement,
    f: &dyn Fn(&str) -> FreeElement,
) -> FreeElement {
    let mut out = FreeElement::zero();
    for (term, c) in el.iter() {
        // Multilinear expansion over the choices for each slot.
        let images: Vec<FreeElement> = term.word.iter().map(|w| f(w)).collect();
        let mut partial: Vec<(Vec<FreeTerm>, Scalar)> = vec![(Vec::new(), c.clone())];
        for img in &images {
            let mut next = Vec::new();
            for (prefix, pc) in &partial {
                for (t, tc) in img.iter() {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    next.push((p, pc * tc));
                }
            }
            partial = next;
        }
        for (choice, pc) in partial {
            let refs: Vec<&FreeTerm> = choice.iter().collect();
            out = out.add(&compose_term(op, term, &refs).scale(&pc));
        }
    }
    out
}

/// `S(P,f)` for a linear map `f` on variables: replaces each letter by its
/// image, expands multilinearly, re-canonicalizes.
pub fn functor_map(op: &Operad, f: &LinearMap, el: &FreeElement) -> FreeElement {
    apply_letters(op, el, |s| f.apply(&Vector::term(s, Scalar::one(op.tag))))
}

/// Letter substitution by an arbitrary vector-valued function (the basis
/// form of [`functor_map`], without materializing modules).
pub fn apply_letters(
    op: &Operad,
    el: &FreeElement,
    f: impl Fn(&str) -> Vector,
) -> FreeElement {
    let mut out = FreeElement::zero();
    for (term, c) in el.iter() {
        let images: Vec<Vector> = term.word.iter().map(|w| f(w)).collect();
        let mut partial: Vec<(Vec<String>, Scalar)> = vec![(Vec::new(), c.clone())];
        for img in &images {
            let mut next = Vec::new();
            for (prefix, pc) in &partial {
                for (s, sc) in img.iter() {
                    let mut p = prefix.clone();
                    p.push(s.clone());
                    next.push((p, pc * sc));
                }
            }
            partial = next;
        }
        for (word, pc) in partial {
            out = out.add(&recanon(op, &term.op, &word).scale(&pc));
        }
    }
    out
}

/// The monad multiplication `γ`: the outer element's letters are JSON term
/// symbols over `V`; each decodes and substitutes.
pub fn monad_mult(op: &Operad, outer: &FreeElement) -> FreeElement {
    bind(op, outer, &|s| {
        FreeElement::single(term_from_symbol(s), Scalar::one(op.tag))
    })
}

/// Wraps an element of `S(P,V)` as a vector over term symbols — the letter
/// alphabet of `S(S(P,V))`.
pub fn as_letters(el: &FreeElement) -> Vector {
    el.to_vector()
}

/// The differential combinator transformation
/// `∂(μ; v₁,…,vₙ) = Σᵢ (μ; (v₁,0),…,(0,vᵢ),…,(vₙ,0))`,
/// landing in `S(P, V×V)` with the tagging `0#v = (v,0)`, `1#v = (0,v)`.
pub fn diff_transform(op: &Operad, el: &FreeElement) -> FreeElement {
    let mut out = FreeElement::zero();
    for (term, c) in el.iter() {
        for i in 0..term.arity() {
            let word: Vec<String> = term
                .word
                .iter()
                .enumerate()
                .map(|(j, w)| {
                    if j == i {
                        format!("1#{w}")
                    } else {
                        format!("0#{w}")
                    }
                })
                .collect();
            out = out.add(&recanon(op, &term.op, &word).scale(c));
        }
    }
    out
}

/// The distributive law `λ: S(V×V) → S(V) × S(V)`,
/// `λ(μ; (u₁,v₁),…,(uₙ,vₙ)) = ((μ; u₁,…,uₙ), Σᵢ (μ; u₁,…,vᵢ,…,uₙ))`.
/// Input letters carry `0#`/`1#` tags; multilinearity makes each basis term
/// contribute to the first component iff all tags are `0`, and to the second
/// iff exactly one tag is `1`.
pub fn dist_law(op: &Operad, el: &FreeElement) -> (FreeElement, FreeElement) {
    let mut first = FreeElement::zero();
    let mut second = FreeElement::zero();
    for (term, c) in el.iter() {
        let mut tags = Vec::with_capacity(term.arity());
        let mut plain = Vec::with_capacity(term.arity());
        for w in &term.word {
            let (tag, rest) = w.split_once('#').expect("tagged letter");
            tags.push(tag.parse::<usize>().expect("tag index"));
            plain.push(rest.to_string());
        }
        let ones = tags.iter().filter(|&&t| t == 1).count();
        if ones == 0 {
            first = first.add(&recanon(op, &term.op, &plain).scale(c));
        } else if ones == 1 {
            second = second.add(&recanon(op, &term.op, &plain).scale(c));
        }
    }
    (first, second)
}

/// `∂ = π₂ ∘ λ_{A×A} ∘ S(⟨1_A, 0, 0, 1_A⟩)` — the differential combinator
/// recovered from the distributive law; extensionally equal to
/// [`diff_transform`].
pub fn partial_from_lambda(op: &Operad, el: &FreeElement) -> FreeElement {
    // ⟨1,0,0,1⟩ : A → (A×A)×(A×A), a ↦ ((a,0),(0,a)).
    let moved = apply_letters(op, el, |s| {
        let mut v = Vector::term(&format!("0#0#{s}"), Scalar::one(op.tag));
        v.add_term(&format!("1#1#{s}"), &Scalar::one(op.tag));
        v
    });
    dist_law(op, &moved).1
}

/// Does `P` admit a D-linear counit?  Yes iff `e_P : R → P(1)` is an
/// isomorphism, i.e. `P(1)` is one-dimensional (spanned by the unit).
pub fn counit_exists(op: &Operad) -> bool {
    op.component(1).dim() == 1 && !op.unit().vec.is_zero()
}

/// The D-linear counit `E(μ; v) = e_P⁻¹(μ)·v` on arity-1 terms, zero on
/// every other arity.  Panics if the counit does not exist.
pub fn dlinear_counit(op: &Operad, el: &FreeElement) -> Vector {
    assert!(counit_exists(op), "P(1) is not one-dimensional");
    let comp = op.component(1);
    let unit_sym = &comp.basis()[0];
    let u = op
        .unit()
        .vec
        .coeff(unit_sym)
        .expect("unit spans P(1)")
        .clone();
    let factor = u.inv().expect("unit coefficient invertible");
    let mut out = Vector::zero();
    for (term, c) in el.iter() {
        if term.arity() == 1 {
            out.add_term(&term.word[0], &(c * &factor));
        }
    }
    out
}

// --- enumeration ------------------------------------------------------------

/// All canonical terms of `S(P, vars)` of arity `n`.
pub fn enumerate_terms(op: &Operad, vars: &BasedModule, n: usize) -> Vec<FreeTerm> {
    let letters: Vec<String> = vars.basis().to_vec();
    if op.is_com() {
        return letters
            .iter()
            .cloned()
            .combinations_with_replacement(n)
            .map(|word| FreeTerm {
                op: format!("c{n}"),
                word,
            })
            .collect();
    }
    if op.is_ass() {
        return words(&letters, n)
            .into_iter()
            .map(|word| FreeTerm {
                op: ass_id(n),
                word,
            })
            .collect();
    }
    if op.is_lie() {
        if n == 0 {
            return vec![];
        }
        let ranks = lex_ranks(&letters);
        let mut out = Vec::new();
        for word in words(&letters, n) {
            let rword: Vec<usize> = word.iter().map(|s| ranks[s]).collect();
            if lie::is_lyndon(&rword) {
                let tree = lie::standard_bracketing(&word, &rword);
                out.push(FreeTerm {
                    op: tree.shape(),
                    word: tree.word(),
                });
            }
        }
        return out;
    }
    if op.is_pointed() {
        if n != 1 {
            return vec![];
        }
        let a = op.pointed_algebra().unwrap();
        let mut out = Vec::new();
        for s in a.module.basis() {
            for v in &letters {
                out.push(FreeTerm {
                    op: s.clone(),
                    word: vec![v.clone()],
                });
            }
        }
        return out;
    }
    // Table operads: canonicalize every raw pair and collect the support —
    // the union of supports is exactly the echelon-free symbol set.
    let mut seen = std::collections::BTreeSet::new();
    for s in op.component(n).basis() {
        for word in words(&letters, n) {
            for (t, _) in canonical_from_basis(op, s, &word).iter() {
                seen.insert(t.clone());
            }
        }
    }
    seen.into_iter().collect()
}

fn words(letters: &[String], n: usize) -> Vec<Vec<String>> {
    if n == 0 {
        return vec![vec![]];
    }
    (0..n)
        .map(|_| letters.iter().cloned())
        .multi_cartesian_product()
        .collect()
}

/// The truncation of `S(P, vars)` to arity ≤ `max_arity` as a based module
/// over JSON term symbols (ordered by arity, then term order).
pub fn free_module(op: &Operad, vars: &BasedModule, max_arity: usize) -> BasedModule {
    let mut syms = Vec::new();
    for n in 0..=max_arity {
        for t in enumerate_terms(op, vars, n) {
            syms.push(term_symbol(&t));
        }
    }
    BasedModule::new(syms, op.tag)
}

// --- axiom suites ------------------------------------------------------------

/// Splits the leading `i#` component tag off a product-module letter.
fn untag(s: &str) -> (usize, &str) {
    let (i, rest) = s.split_once('#').expect("tagged letter");
    (i.parse().expect("tag index"), rest)
}

fn retag(i: usize, s: &str) -> String {
    format!("{i}#{s}")
}

/// Test inputs for one suite: every canonical basis term to `arity_bound`,
/// plus `trials` seeded random elements.
fn suite_inputs(
    op: &Operad,
    vars: &BasedModule,
    arity_bound: usize,
    trials: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<FreeElement> {
    let mut inputs = Vec::new();
    for n in 0..=arity_bound {
        for t in enumerate_terms(op, vars, n) {
            inputs.push(FreeElement::single(t, Scalar::one(op.tag)));
        }
    }
    for _ in 0..trials {
        inputs.push(crate::rng::random_element(op, vars, arity_bound, rng));
    }
    inputs
}

/// Runs one aggregated equality check over a family of inputs, recording a
/// single pass line or the first counterexample.
fn run_equality<I: fmt::Display>(
    report: &mut Report,
    name: &str,
    paper_ref: &str,
    inputs: &[I],
    mut sides: impl FnMut(&I) -> (String, String),
) {
    for x in inputs {
        let (lhs, rhs) = sides(x);
        if lhs != rhs {
            report.fail(
                name,
                paper_ref,
                &format!("input {x}: lhs = {lhs}, rhs = {rhs}"),
            );
            return;
        }
    }
    report.pass(name, paper_ref);
}

/// The tangent-space projection `π₁ : A×A → A` as a letter map.
fn pi1_letter(s: &str) -> Vector {
    let (i, rest) = untag(s);
    if i == 0 {
        Vector::term(rest, Scalar::one(crate::scalar::FieldTag::Q))
    } else {
        Vector::zero()
    }
}

/// Checks [DC.1]–[DC.6] and the [DC.N] negation lemma for the canonical
/// differential combinator transformation.
pub fn check_dc_axioms(
    op: &Operad,
    vars: &BasedModule,
    arity_bound: usize,
    trials: usize,
    seed: u64,
) -> Report {
    check_dc_axioms_with(op, vars, arity_bound, trials, seed, &diff_transform)
}

/// The same suite with a pluggable `∂` — used by the mutation tests.
pub fn check_dc_axioms_with(
    op: &Operad,
    vars: &BasedModule,
    arity_bound: usize,
    trials: usize,
    seed: u64,
    d: &dyn Fn(&Operad, &FreeElement) -> FreeElement,
) -> Report {
    let one = Scalar::one(op.tag);
    let mut rng = crate::rng::seeded(seed);
    let mut report = Report::new("check-dc", &op.id, "differential combinator axioms")
        .with_seed(seed)
        .with_bounds(&format!("arity<={arity_bound}, trials={trials}"));
    let inputs = suite_inputs(op, vars, arity_bound, trials, &mut rng);

    // [DC.1] S(π₁) ∘ ∂ = 0.
    run_equality(
        &mut report,
        "DC.1",
        "S(pi1) . d = 0",
        &inputs,
        |x| {
            let lhs = apply_letters(op, &d(op, x), |s| {
                let (i, rest) = untag(s);
                if i == 0 {
                    Vector::term(rest, one.clone())
                } else {
                    Vector::zero()
                }
            });
            (lhs.to_string(), FreeElement::zero().to_string())
        },
    );

    // [DC.2] S(⟨π₁,π₂,π₂⟩)∘∂ = S(⟨π₁,π₂,0⟩)∘∂ + S(⟨π₁,0,π₂⟩)∘∂.
    run_equality(
        &mut report,
        "DC.2",
        "additivity of the derivative slot",
        &inputs,
        |x| {
            let dx = d(op, x);
            let lhs = apply_letters(op, &dx, |s| {
                let (i, rest) = untag(s);
                if i == 0 {
                    Vector::term(&retag(0, rest), one.clone())
                } else {
                    let mut v = Vector::term(&retag(1, rest), one.clone());
                    v.add_term(&retag(2, rest), &one);
                    v
                }
            });
            let r1 = apply_letters(op, &dx, |s| {
                let (i, rest) = untag(s);
                Vector::term(&retag(i, rest), one.clone())
            });
            let r2 = apply_letters(op, &dx, |s| {
                let (i, rest) = untag(s);
                if i == 0 {
                    Vector::term(&retag(0, rest), one.clone())
                } else {
                    Vector::term(&retag(2, rest), one.clone())
                }
            });
            (lhs.to_string(), r1.add(&r2).to_string())
        },
    );

    // [DC.3] ∂ ∘ η = η ∘ ⟨0, 1⟩ (checked on basis vectors and random ones).
    let mut vec_inputs: Vec<Vector> = vars.basis().iter().map(|s| vars.gen(s)).collect();
    for _ in 0..trials.min(20) {
        vec_inputs.push(crate::rng::random_vector(vars, &mut rng));
    }
    run_equality(
        &mut report,
        "DC.3",
        "d . eta = eta . <0,1>",
        &vec_inputs,
        |v| {
            let lhs = d(op, &monad_unit(op, v));
            let shifted = v.map_symbols(|s| retag(1, s));
            (lhs.to_string(), monad_unit(op, &shifted).to_string())
        },
    );

    // [DC.4] ∂∘γ = γ_{A×A} ∘ S(S(⟨1,0⟩)∘π₁ + ∂∘π₂) ∘ ∂_{S(A)}.
    let inner = free_module(op, vars, arity_bound.min(2));
    let mut nested = suite_inputs(op, &inner, 2, trials.min(40), &mut rng);
    nested.truncate(400);
    run_equality(
        &mut report,
        "DC.4",
        "chain rule against the multiplication",
        &nested,
        |x| {
            let lhs = d(op, &monad_mult(op, x));
            let dsx = d(op, x);
            let moved = apply_letters(op, &dsx, |s| {
                let (i, ts) = untag(s);
                let t = term_from_symbol(ts);
                let el = FreeElement::single(t, one.clone());
                let img = if i == 0 {
                    // S(⟨1,0⟩): embed the point part.
                    apply_letters(op, &el, |v| Vector::term(&retag(0, v), one.clone()))
                } else {
                    d(op, &el)
                };
                img.to_vector()
            });
            let rhs = monad_mult(op, &moved);
            (lhs.to_string(), rhs.to_string())
        },
    );

    // [DC.5] S(⟨π₁,π₄⟩) ∘ ∂_{A×A} ∘ ∂ = ∂.
    run_equality(
        &mut report,
        "DC.5",
        "linearity of the derivative slot",
        &inputs,
        |x| {
            let ddx = d(op, &d(op, x));
            let lhs = apply_letters(op, &ddx, |s| {
                let (i, rest) = untag(s);
                let (j, base) = untag(rest);
                match (i, j) {
                    (0, 0) => Vector::term(&retag(0, base), one.clone()),
                    (1, 1) => Vector::term(&retag(1, base), one.clone()),
                    _ => Vector::zero(),
                }
            });
            (lhs.to_string(), d(op, x).to_string())
        },
    );

    // [DC.6] S(⟨π₁,π₃,π₂,π₄⟩) ∘ ∂∘∂ = ∂∘∂ (symmetry of second derivatives).
    run_equality(
        &mut report,
        "DC.6",
        "symmetry of the second derivative",
        &inputs,
        |x| {
            let ddx = d(op, &d(op, x));
            let lhs = apply_letters(op, &ddx, |s| {
                let (i, rest) = untag(s);
                let (j, base) = untag(rest);
                let (i2, j2) = match (i, j) {
                    (0, 1) => (1, 0),
                    (1, 0) => (0, 1),
                    other => other,
                };
                Vector::term(&retag(i2, &retag(j2, base)), one.clone())
            });
            (lhs.to_string(), ddx.to_string())
        },
    );

    // [DC.N] S(⟨π₁,−π₂⟩) ∘ ∂ = −∂.
    run_equality(
        &mut report,
        "DC.N",
        "negation compatibility",
        &inputs,
        |x| {
            let dx = d(op, x);
            let lhs = apply_letters(op, &dx, |s| {
                let (i, rest) = untag(s);
                if i == 0 {
                    Vector::term(&retag(0, rest), one.clone())
                } else {
                    Vector::term(&retag(1, rest), one.clone()).neg()
                }
            });
            (lhs.to_string(), dx.neg().to_string())
        },
    );

    // Naturality: ∂ ∘ S(f) = S(f×f) ∘ ∂ for random linear maps f.
    let w = BasedModule::from_names(&["w0", "w1"], op.tag);
    let mut nat_cases = Vec::new();
    for _ in 0..20 {
        let f = crate::rng::random_linear_map(vars, &w, &mut rng);
        for x in inputs.iter().take(6) {
            nat_cases.push((f.clone(), x.clone()));
        }
    }
    for (idx, (f, x)) in nat_cases.iter().enumerate() {
        let lhs = d(op, &functor_map(op, f, x));
        let rhs = apply_letters(op, &d(op, x), |s| {
            let (i, rest) = untag(s);
            f.apply(&Vector::term(rest, one.clone()))
                .map_symbols(|t| retag(i, t))
        });
        if lhs != rhs {
            report.fail(
                "DC.naturality",
                "naturality of the differential combinator",
                &format!("case {idx}: input {x}: lhs = {lhs}, rhs = {rhs}"),
            );
            return report;
        }
    }
    report.pass("DC.naturality", "naturality of the differential combinator");
    report
}

/// Applies `λ × λ` after `λ_{A×A}` — the 4-tuple of components used by the
/// `l×` and `c×` axioms.  Input letters carry nested `i#j#` tags.
fn lambda_square(op: &Operad, x: &FreeElement) -> [FreeElement; 4] {
    let (y1, y2) = dist_law(op, x);
    let (z11, z12) = dist_law(op, &y1);
    let (z21, z22) = dist_law(op, &y2);
    [z11, z12, z21, z22]
}

/// Checks the tangent-monad (B-distributive-law) equalities for
/// `λ = ⟨S(π₁), π₂∘λ⟩` given by the closed substitution formula, plus the
/// `∂ ↔ λ` round trip and the naturality of `λ`.
pub fn check_lambda_axioms(
    op: &Operad,
    vars: &BasedModule,
    arity_bound: usize,
    trials: usize,
    seed: u64,
) -> Report {
    let one = Scalar::one(op.tag);
    let mut rng = crate::rng::seeded(seed);
    let mut report = Report::new("check-lambda", &op.id, "tangent-monad distributive law")
        .with_seed(seed)
        .with_bounds(&format!("arity<={arity_bound}, trials={trials}"));

    let pair = crate::linalg::product_module(&[vars, vars]);
    let triple = crate::linalg::product_module(&[vars, vars, vars]);
    let quad = crate::linalg::product_module(&[&pair, &pair]);
    let paired_inputs = suite_inputs(op, &pair, arity_bound, trials, &mut rng);
    let plain_inputs = suite_inputs(op, vars, arity_bound, trials, &mut rng);
    let triple_inputs = suite_inputs(op, &triple, arity_bound.min(3), trials, &mut rng);
    let quad_inputs = suite_inputs(op, &quad, arity_bound.min(3), trials, &mut rng);

    // λ ∘ γ_{A×A} = (γ×γ) ∘ λ_{S(A)} ∘ S(λ).
    let inner = free_module(op, &pair, arity_bound.min(2));
    let mut nested = suite_inputs(op, &inner, 2, trials.min(40), &mut rng);
    nested.truncate(400);
    for x in &nested {
        let gx = monad_mult(op, x);
        let lhs = dist_law(op, &gx);
        // S(λ): each letter (a term over A×A) maps to the tagged pair of
        // term-symbol vectors of its λ image.
        let slam = apply_letters(op, x, |ts| {
            let t = term_from_symbol(ts);
            let (a, b) = dist_law(op, &FreeElement::single(t, one.clone()));
            let mut v = a.to_vector().map_symbols(|s| retag(0, s));
            for (s, c) in b.to_vector().iter() {
                v.add_term(&retag(1, s), c);
            }
            v
        });
        let (w1, w2) = dist_law(op, &slam);
        let rhs = (monad_mult(op, &w1), monad_mult(op, &w2));
        if lhs != rhs {
            report.fail(
                "lambda.mult",
                "distributive law against the multiplication",
                &format!("input {x}"),
            );
            break;
        }
    }
    if !report.checks.iter().any(|c| c.name == "lambda.mult") {
        report.pass("lambda.mult", "distributive law against the multiplication");
    }

    // λ ∘ η_{A×A} = η × η.
    let mut pair_vecs: Vec<Vector> = pair.basis().iter().map(|s| pair.gen(s)).collect();
    for _ in 0..trials.min(20) {
        pair_vecs.push(crate::rng::random_vector(&pair, &mut rng));
    }
    run_equality(
        &mut report,
        "lambda.unit",
        "distributive law against the unit",
        &pair_vecs,
        |w| {
            let lhs = dist_law(op, &monad_unit(op, w));
            let mut u = Vector::zero();
            let mut v = Vector::zero();
            for (s, c) in w.iter() {
                let (i, rest) = untag(s);
                if i == 0 {
                    u.add_term(rest, c);
                } else {
                    v.add_term(rest, c);
                }
            }
            let rhs = (monad_unit(op, &u), monad_unit(op, &v));
            (format!("{} | {}", lhs.0, lhs.1), format!("{} | {}", rhs.0, rhs.1))
        },
    );

    // p×: π₁ ∘ λ = S(π₁).
    run_equality(
        &mut report,
        "lambda.projection",
        "first component is the functor image of pi1",
        &paired_inputs,
        |x| {
            let lhs = dist_law(op, x).0;
            let rhs = apply_letters(op, x, pi1_letter);
            (lhs.to_string(), rhs.to_string())
        },
    );

    // z×: λ ∘ S(⟨1,0⟩) = ⟨1, 0⟩.
    run_equality(
        &mut report,
        "lambda.zero",
        "compatibility with the zero map",
        &plain_inputs,
        |x| {
            let embedded = apply_letters(op, x, |s| Vector::term(&retag(0, s), one.clone()));
            let lhs = dist_law(op, &embedded);
            (
                format!("{} | {}", lhs.0, lhs.1),
                format!("{} | {}", x, FreeElement::zero()),
            )
        },
    );

    // s×: λ∘S(s×) = s×_{S(A)} ∘ ⟨S(π₁), π₂∘λ∘S(q₁), π₂∘λ∘S(q₂)⟩.
    run_equality(
        &mut report,
        "lambda.sum",
        "compatibility with the sum map",
        &triple_inputs,
        |x| {
            let sx = apply_letters(op, x, |s| {
                let (i, rest) = untag(s);
                let out = if i == 0 { 0 } else { 1 };
                Vector::term(&retag(out, rest), one.clone())
            });
            let lhs = dist_law(op, &sx);
            let first = apply_letters(op, x, |s| {
                let (i, rest) = untag(s);
                if i == 0 {
                    Vector::term(rest, one.clone())
                } else {
                    Vector::zero()
                }
            });
            let q = |keep: usize, x: &FreeElement| {
                let qx = apply_letters(op, x, |s| {
                    let (i, rest) = untag(s);
                    if i == 0 {
                        Vector::term(&retag(0, rest), one.clone())
                    } else if i == keep {
                        Vector::term(&retag(1, rest), one.clone())
                    } else {
                        Vector::zero()
                    }
                });
                dist_law(op, &qx).1
            };
            let rhs = (first, q(1, x).add(&q(2, x)));
            (
                format!("{} | {}", lhs.0, lhs.1),
                format!("{} | {}", rhs.0, rhs.1),
            )
        },
    );

    // l×: l×_{S(A)} ∘ λ = (λ×λ) ∘ λ_{A×A} ∘ S(l×_A).
    run_equality(
        &mut report,
        "lambda.lift",
        "compatibility with the lift",
        &paired_inputs,
        |x| {
            let (a, b) = dist_law(op, x);
            let lhs = [a, FreeElement::zero(), FreeElement::zero(), b];
            let lx = apply_letters(op, x, |s| {
                let (i, rest) = untag(s);
                Vector::term(&retag(i, &retag(i, rest)), one.clone())
            });
            let rhs = lambda_square(op, &lx);
            (
                lhs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" | "),
                rhs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" | "),
            )
        },
    );

    // c×: c×_{S(A)} ∘ (λ×λ) ∘ λ_{A×A} = (λ×λ) ∘ λ_{A×A} ∘ S(c×_A).
    run_equality(
        &mut report,
        "lambda.flip",
        "compatibility with the canonical flip",
        &quad_inputs,
        |x| {
            let z = lambda_square(op, x);
            let lhs = [z[0].clone(), z[2].clone(), z[1].clone(), z[3].clone()];
            let cx = apply_letters(op, x, |s| {
                let (i, rest) = untag(s);
                let (j, base) = untag(rest);
                let (i2, j2) = match (i, j) {
                    (0, 1) => (1, 0),
                    (1, 0) => (0, 1),
                    other => other,
                };
                Vector::term(&retag(i2, &retag(j2, base)), one.clone())
            });
            let rhs = lambda_square(op, &cx);
            (
                lhs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" | "),
                rhs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" | "),
            )
        },
    );

    // n×: n×_{S(A)} ∘ λ = λ ∘ S(n×_A).
    run_equality(
        &mut report,
        "lambda.negation",
        "compatibility with the negation",
        &paired_inputs,
        |x| {
            let (a, b) = dist_law(op, x);
            let lhs = (a, b.neg());
            let nx = apply_letters(op, x, |s| {
                let (i, rest) = untag(s);
                let v = Vector::term(&retag(i, rest), one.clone());
                if i == 1 {
                    v.neg()
                } else {
                    v
                }
            });
            let rhs = dist_law(op, &nx);
            (
                format!("{} | {}", lhs.0, lhs.1),
                format!("{} | {}", rhs.0, rhs.1),
            )
        },
    );

    // Round trip: π₂ ∘ λ ∘ S(⟨1,0,0,1⟩) = ∂.
    run_equality(
        &mut report,
        "lambda.roundtrip",
        "lambda determines the differential combinator",
        &plain_inputs,
        |x| {
            (
                partial_from_lambda(op, x).to_string(),
                diff_transform(op, x).to_string(),
            )
        },
    );

    // Naturality: (S(f)×S(f)) ∘ λ_V = λ_W ∘ S(f×f).
    let w = BasedModule::from_names(&["w0", "w1"], op.tag);
    for idx in 0..20 {
        let f = crate::rng::random_linear_map(vars, &w, &mut rng);
        let mut ok = true;
        for x in paired_inputs.iter().take(6) {
            let (a, b) = dist_law(op, x);
            let lhs = (functor_map(op, &f, &a), functor_map(op, &f, &b));
            let fx = apply_letters(op, x, |s| {
                let (i, rest) = untag(s);
                f.apply(&Vector::term(rest, one.clone()))
                    .map_symbols(|t| retag(i, t))
            });
            let rhs = dist_law(op, &fx);
            if lhs != rhs {
                report.fail(
                    "lambda.naturality",
                    "naturality of the distributive law",
                    &format!("case {idx}: input {x}"),
                );
                ok = false;
                break;
            }
        }
        if !ok {
            return report;
        }
    }
    report.pass("lambda.naturality", "naturality of the distributive law");
    report
}

/// Monad-law suite: unit laws and associativity on basis terms and seeded
/// random elements.
pub fn check_monad_laws(
    op: &Operad,
    vars: &BasedModule,
    arity_bound: usize,
    trials: usize,
    seed: u64,
) -> Report {
    let one = Scalar::one(op.tag);
    let mut rng = crate::rng::seeded(seed);
    let mut report = Report::new("check-monad", &op.id, "monad laws")
        .with_seed(seed)
        .with_bounds(&format!("arity<={arity_bound}, trials={trials}"));
    let inputs = suite_inputs(op, vars, arity_bound, trials, &mut rng);

    // γ ∘ S(η) = id.
    run_equality(
        &mut report,
        "monad.unit-right",
        "gamma . S(eta) = id",
        &inputs,
        |x| {
            let wrapped = apply_letters(op, x, |s| {
                monad_unit(op, &Vector::term(s, one.clone())).to_vector()
            });
            (monad_mult(op, &wrapped).to_string(), x.to_string())
        },
    );

    // γ ∘ η_{S} = id.
    run_equality(
        &mut report,
        "monad.unit-left",
        "gamma . eta_S = id",
        &inputs,
        |x| {
            let eta_s = monad_unit(op, &x.to_vector());
            (monad_mult(op, &eta_s).to_string(), x.to_string())
        },
    );

    // γ ∘ S(γ) = γ ∘ γ_S on doubly nested elements.
    let inner = free_module(op, vars, arity_bound.min(2));
    let middle = free_module(op, &inner, 2);
    let mut nested2 = suite_inputs(op, &middle, 2, trials.min(20), &mut rng);
    nested2.truncate(200);
    run_equality(
        &mut report,
        "monad.assoc",
        "gamma . S(gamma) = gamma . gamma_S",
        &nested2,
        |x| {
            let sgamma = apply_letters(op, x, |ts| {
                let t = term_from_symbol(ts);
                monad_mult(op, &FreeElement::single(t, one.clone())).to_vector()
            });
            let lhs = monad_mult(op, &sgamma);
            let rhs = monad_mult(op, &monad_mult(op, x));
            (lhs.to_string(), rhs.to_string())
        },
    );

    // Canonicalization soundness: same orbit ⇒ same normal form.
    for n in 1..=arity_bound.min(3) {
        let comp = op.component(n);
        if comp.dim() == 0 {
            continue;
        }
        for _ in 0..trials.min(25) {
            let sym = &comp.basis()[rng.gen_range(0..comp.dim())];
            let word: Vec<String> = (0..n)
                .map(|_| vars.basis()[rng.gen_range(0..vars.dim())].clone())
                .collect();
            let perms = Permutation::all(n);
            let sigma = &perms[rng.gen_range(0..perms.len())];
            let mu = OperadElement {
                arity: n,
                vec: comp.gen(sym),
            };
            let lhs = canonicalize(op, &mu, &word);
            let moved = crate::operad::sigma_act(op, &mu, sigma);
            let rhs = canonicalize(op, &moved, &perm_act_word(sigma, &word));
            if lhs != rhs {
                report.fail(
                    "monad.canonical",
                    "orbit members share a normal form",
                    &format!("({sym}; {}) vs sigma={sigma}", word.join(",")),
                );
                return report;
            }
        }
    }
    report.pass("monad.canonical", "orbit members share a normal form");
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{make_ass, make_com, make_lie, make_pointed_operad, AssocAlgebra};
    use crate::scalar::FieldTag;

    fn q() -> FieldTag {
        FieldTag::Q
    }

    fn vars_xy() -> BasedModule {
        BasedModule::from_names(&["x", "y"], q())
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n, q())
    }

    #[test]
    fn com_canonicalization_sorts() {
        let com = make_com(q());
        let mu = OperadElement {
            arity: 2,
            vec: com.component(2).gen("c2"),
        };
        let el = canonicalize(&com, &mu, &["y".into(), "x".into()]);
        assert_eq!(
            el,
            FreeElement::single(FreeTerm::new("c2", &["x", "y"]), s(1))
        );
    }

    #[test]
    fn ass_canonicalization_hits_identity_and_counts_tensors() {
        let ass = make_ass(q());
        // Every orbit representative lands on the identity operad symbol.
        for p in Permutation::all(3) {
            let mu = OperadElement {
                arity: 3,
                vec: ass.component(3).gen(&ass_symbol(&p)),
            };
            let el = canonicalize(&ass, &mu, &["x".into(), "y".into(), "x".into()]);
            assert_eq!(el.terms.len(), 1);
            let t = el.terms.keys().next().unwrap();
            assert_eq!(t.op, ass_id(3));
        }
        // Term count per degree = dim Ten(V) = (dim V)^n.
        let v = vars_xy();
        for n in 0..=4 {
            assert_eq!(enumerate_terms(&ass, &v, n).len(), 2usize.pow(n as u32));
        }
    }

    #[test]
    fn lie_enumeration_dimensions() {
        // dim Lie(V)_n for dim V = 2: 2, 1, 2, 3 (Lyndon words in x,y).
        let lie_op = make_lie(q());
        let v = vars_xy();
        let dims: Vec<usize> = (1..=4)
            .map(|n| enumerate_terms(&lie_op, &v, n).len())
            .collect();
        assert_eq!(dims, vec![2, 1, 2, 3]);
    }

    #[test]
    fn monad_unit_and_mult_examples() {
        let com = make_com(q());
        // γ(c₂; (c₂;x,x), (1;y)) = (c₃; x,x,y).
        let inner1 = FreeTerm::new("c2", &["x", "x"]);
        let inner2 = FreeTerm::new("c1", &["y"]);
        let outer = FreeElement::single(
            FreeTerm {
                op: "c2".into(),
                word: vec![term_symbol(&inner1), term_symbol(&inner2)],
            },
            s(1),
        );
        assert_eq!(
            monad_mult(&com, &outer),
            FreeElement::single(FreeTerm::new("c3", &["x", "x", "y"]), s(1))
        );
        // Linearity of the unit.
        let v = Vector::from_terms(&[("x", s(2)), ("y", s(1))]);
        let u = monad_unit(&com, &v);
        assert_eq!(u.terms.len(), 2);
        assert_eq!(u.terms[&FreeTerm::new("c1", &["x"])], s(2));
    }

    #[test]
    fn functor_map_binomial() {
        // Com, f(x) = x + y on (c₂;x,x) → (c₂;x,x) + 2(c₂;x,y) + (c₂;y,y).
        let com = make_com(q());
        let v = vars_xy();
        let f = LinearMap::from_fn(v.clone(), v.clone(), |sym| {
            if sym == "x" {
                Vector::from_terms(&[("x", s(1)), ("y", s(1))])
            } else {
                Vector::term("y", s(1))
            }
        });
        let el = FreeElement::single(FreeTerm::new("c2", &["x", "x"]), s(1));
        let img = functor_map(&com, &f, &el);
        assert_eq!(img.terms[&FreeTerm::new("c2", &["x", "y"])], s(2));
        assert_eq!(img.terms.len(), 3);
    }

    #[test]
    fn diff_examples() {
        let com = make_com(q());
        // ∂(1;x) = (1; d·x).
        let x = FreeElement::single(FreeTerm::new("c1", &["x"]), s(1));
        assert_eq!(
            diff_transform(&com, &x),
            FreeElement::single(FreeTerm::new("c1", &["1#x"]), s(1))
        );
        // ∂(c₂;x,x) = 2(c₂; x, d·x).
        let xx = FreeElement::single(FreeTerm::new("c2", &["x", "x"]), s(1));
        assert_eq!(
            diff_transform(&com, &xx),
            FreeElement::single(FreeTerm::new("c2", &["0#x", "1#x"]), s(2))
        );
        // Arity 0 dies.
        let c = FreeElement::single(FreeTerm::new("c0", &[]), s(1));
        assert!(diff_transform(&com, &c).is_zero());
    }

    #[test]
    fn dist_law_example() {
        let com = make_com(q());
        // (c₂;(u₁,v₁),(u₂,v₂)) → ((c₂;u₁,u₂), (c₂;v₁,u₂)+(c₂;u₁,v₂)),
        // expanded on tagged basis terms.
        let t = FreeElement::single(FreeTerm::new("c2", &["0#u1", "0#u2"]), s(1));
        let (a, b) = dist_law(&com, &t);
        assert_eq!(a, FreeElement::single(FreeTerm::new("c2", &["u1", "u2"]), s(1)));
        assert!(b.is_zero());
        let t2 = FreeElement::single(FreeTerm::new("c2", &["0#u1", "1#v2"]), s(1));
        let (a2, b2) = dist_law(&com, &t2);
        assert!(a2.is_zero());
        assert_eq!(b2, FreeElement::single(FreeTerm::new("c2", &["u1", "v2"]), s(1)));
    }

    #[test]
    fn counit_examples() {
        let com = make_com(q());
        assert!(counit_exists(&com));
        let x = FreeElement::single(FreeTerm::new("c1", &["x"]), s(3));
        assert_eq!(dlinear_counit(&com, &x), Vector::term("x", s(3)));
        let xyz = FreeElement::single(FreeTerm::new("c3", &["x", "y", "z"]), s(1));
        assert!(dlinear_counit(&com, &xyz).is_zero());
        let dual = make_pointed_operad(AssocAlgebra::dual_numbers(q()));
        assert!(!counit_exists(&dual));
    }

    #[test]
    fn dc_suite_smoke_com_lie() {
        let v = vars_xy();
        for op in [make_com(q()), make_lie(q())] {
            let r = check_dc_axioms(&op, &v, 3, 10, 7);
            assert!(r.all_passed(), "{}: {}", op.id, r.render_text());
        }
    }

    #[test]
    fn dc_suite_smoke_ass_pointed() {
        let v = vars_xy();
        for op in [
            make_ass(q()),
            make_pointed_operad(AssocAlgebra::dual_numbers(q())),
        ] {
            let r = check_dc_axioms(&op, &v, 3, 10, 7);
            assert!(r.all_passed(), "{}: {}", op.id, r.render_text());
        }
    }

    #[test]
    fn dc_mutation_is_caught() {
        // Skipping the i = 1 slot breaks DC.2 and DC.5 (and others).
        let com = make_com(q());
        let v = vars_xy();
        let mutated = |op: &Operad, el: &FreeElement| -> FreeElement {
            let mut out = FreeElement::zero();
            for (term, c) in el.iter() {
                for i in 1..term.arity() {
                    let word: Vec<String> = term
                        .word
                        .iter()
                        .enumerate()
                        .map(|(j, w)| if j == i { format!("1#{w}") } else { format!("0#{w}") })
                        .collect();
                    out = out.add(&recanon(op, &term.op, &word).scale(c));
                }
            }
            out
        };
        let r = check_dc_axioms_with(&com, &v, 3, 10, 7, &mutated);
        // The suite must detect the mutation with a counterexample.  (The
        // specific axioms that catch it depend on the canonical word order:
        // sorted Com words keep the d-slot out of position 0, so the unit
        // and chain-rule axioms are the ones that flag this mutation.)
        assert!(!r.all_passed());
        assert!(r.failures().all(|c| c.counterexample.is_some()));
        let failed: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"DC.3"), "failed: {failed:?}");
        assert!(failed.contains(&"DC.4"), "failed: {failed:?}");
    }

    #[test]
    fn lambda_suite_smoke() {
        let v = vars_xy();
        for op in [make_com(q()), make_lie(q())] {
            let r = check_lambda_axioms(&op, &v, 2, 8, 11);
            assert!(r.all_passed(), "{}: {}", op.id, r.render_text());
        }
    }

    #[test]
    fn monad_laws_smoke() {
        let v = vars_xy();
        for op in [make_com(q()), make_ass(q()), make_lie(q())] {
            let r = check_monad_laws(&op, &v, 3, 10, 13);
            assert!(r.all_passed(), "{}: {}", op.id, r.render_text());
        }
    }
}
