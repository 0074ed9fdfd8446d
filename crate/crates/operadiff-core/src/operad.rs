//! Symmetric algebraic operads: components with right `Σ(n)`-actions, the
//! unit, partial and complete composition, built-in operads (`Com`, `Ass`,
//! `Lie`, `A•`), user-supplied table operads, and the axiom checkers.
//!
//! Slot conventions: the public composition API is 1-based (`∘ᵢ` with
//! `1 ≤ i ≤ m`, as in the displayed formulas); internals are 0-based.
//! Equivariance is phrased through the composition of permutations in the
//! associative operad: `(μ·π) ∘ᵢ (ν·ρ) = (μ ∘_{π(i)} ν) · (π ∘ᵢ ρ)`, where
//! `π ∘ᵢ ρ` is `Ass`-composition of permutations.  This single formula is
//! validated by brute force in the axiom suite, which pins down the slot
//! reindexing convention once for the whole engine.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use crate::lie::{self, LieTree};
use crate::linalg::{solve, BasedModule, LinearMap, Vector};
use crate::perm::{perm_compose, Permutation};
use crate::report::Report;
use crate::scalar::{FieldTag, Scalar};

/// Default truncation bound for arity enumeration.
pub const DEFAULT_MAX_ARITY: usize = 6;

/// An element of one operad component `P(n)`: a linear combination of the
/// arity-`n` basis symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperadElement {
    pub arity: usize,
    pub vec: Vector,
}

impl OperadElement {
    pub fn zero(arity: usize) -> Self {
        OperadElement {
            arity,
            vec: Vector::zero(),
        }
    }

    pub fn basis(arity: usize, sym: &str, tag: FieldTag) -> Self {
        OperadElement {
            arity,
            vec: Vector::term(sym, Scalar::one(tag)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vec.is_zero()
    }

    pub fn add(&self, other: &OperadElement) -> OperadElement {
        assert_eq!(self.arity, other.arity, "adding different arities");
        OperadElement {
            arity: self.arity,
            vec: self.vec.add(&other.vec),
        }
    }

    pub fn scale(&self, c: &Scalar) -> OperadElement {
        OperadElement {
            arity: self.arity,
            vec: self.vec.scale(c),
        }
    }

    pub fn sub(&self, other: &OperadElement) -> OperadElement {
        self.add(&other.scale(&Scalar::from_int(-1, other.tag_guess())))
    }

    fn tag_guess(&self) -> FieldTag {
        self.vec
            .iter()
            .next()
            .map(|(_, c)| c.tag())
            .unwrap_or(FieldTag::Q)
    }
}

impl fmt::Display for OperadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.vec)
    }
}

/// A unital associative algebra by structure constants — the input of the
/// pointed operad `A•` (`A•(1) = A`, `A•(n) = 0` otherwise).
#[derive(Debug, Clone)]
pub struct AssocAlgebra {
    pub module: BasedModule,
    pub unit: Vector,
    /// `mult[(a, b)]` = the product of basis elements `a · b`.
    pub mult: BTreeMap<(String, String), Vector>,
}

impl AssocAlgebra {
    pub fn product(&self, a: &Vector, b: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (sa, ca) in a.iter() {
            for (sb, cb) in b.iter() {
                let entry = self
                    .mult
                    .get(&(sa.clone(), sb.clone()))
                    .cloned()
                    .unwrap_or_default();
                out = out.add(&entry.scale(&(ca * cb)));
            }
        }
        out
    }

    /// The dual numbers `ℚ[t]/(t²)` — the running `A•` example.
    pub fn dual_numbers(tag: FieldTag) -> Self {
        let module = BasedModule::from_names(&["1", "t"], tag);
        let one = Scalar::one(tag);
        let mut mult = BTreeMap::new();
        mult.insert(("1".into(), "1".into()), Vector::term("1", one.clone()));
        mult.insert(("1".into(), "t".into()), Vector::term("t", one.clone()));
        mult.insert(("t".into(), "1".into()), Vector::term("t", one.clone()));
        mult.insert(("t".into(), "t".into()), Vector::zero());
        AssocAlgebra {
            unit: module.gen("1"),
            module,
            mult,
        }
    }
}

/// Explicit data for a finite table operad.
#[derive(Debug, Clone)]
pub struct TableOperadData {
    /// `components[n]` is `P(n)`, for `n ≤ max_arity`.
    pub components: Vec<BasedModule>,
    /// The unit element of `P(1)`.
    pub unit: Vector,
    /// `(arity, basis symbol, permutation one-line) → image`; missing
    /// entries mean the action is trivial on that symbol.
    pub action: BTreeMap<(usize, String, Vec<usize>), Vector>,
    /// `(arity of μ, μ symbol, 0-based slot, ν symbol) → composite`.
    pub pcompose: BTreeMap<(usize, String, usize, String), Vector>,
}

#[derive(Debug)]
enum OperadKind {
    Com,
    Ass,
    Lie,
    Pointed(AssocAlgebra),
    Table(TableOperadData),
}

/// Cached multilinear Lie data for one arity: the Lyndon-tree basis (over
/// position leaves `"0"‥"n-1"`) and the change of basis to/from the
/// left-combed operad basis.
struct LieArity {
    /// Canonical multilinear Lyndon trees, in lexicographic word order.
    lyndon: Vec<LieTree>,
    /// Left-combed basis symbols in component order.
    lc_syms: Vec<String>,
    /// Expansion of each Lyndon tree in the left-combed basis.
    lyndon_in_lc: Vec<Vector>,
}

/// A symmetric operad over a fixed field, truncated at `max_arity`.
pub struct Operad {
    pub id: String,
    pub tag: FieldTag,
    pub max_arity: usize,
    kind: OperadKind,
    lie_cache: Mutex<HashMap<usize, std::sync::Arc<LieArity>>>,
}

impl fmt::Debug for Operad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operad({})", self.id)
    }
}

/// `Com`: one basis operation per arity, trivial action.
pub fn make_com(tag: FieldTag) -> Operad {
    Operad::new("com", tag, DEFAULT_MAX_ARITY, OperadKind::Com)
}

/// `Ass`: the regular representations `R[Σ(n)]`.
pub fn make_ass(tag: FieldTag) -> Operad {
    Operad::new("ass", tag, DEFAULT_MAX_ARITY, OperadKind::Ass)
}

/// `Lie`: components of dimension `(n-1)!` in the left-combed basis, with
/// arithmetic delegated to the Lyndon rewriting engine.
pub fn make_lie(tag: FieldTag) -> Operad {
    Operad::new("lie", tag, DEFAULT_MAX_ARITY, OperadKind::Lie)
}

/// `A•` for a unital associative algebra `A`: everything concentrated in
/// arity 1, where composition is the multiplication of `A`.
pub fn make_pointed_operad(algebra: AssocAlgebra) -> Operad {
    let tag = algebra.module.tag();
    Operad::new("pointed", tag, DEFAULT_MAX_ARITY, OperadKind::Pointed(algebra))
}

/// A finite operad from explicit tables; `verify` runs the axiom suite at
/// construction and fails loudly on a violation.
pub fn make_table_operad(
    id: &str,
    tag: FieldTag,
    data: TableOperadData,
    verify: bool,
) -> Result<Operad, String> {
    let max_arity = data.components.len() - 1;
    let op = Operad::new(id, tag, max_arity, OperadKind::Table(data));
    if verify {
        let report = check_operad_axioms(&op, max_arity.min(3));
        if !report.all_passed() {
            let first = report.failures().next().unwrap();
            return Err(format!(
                "table operad violates {}: {}",
                first.name,
                first.counterexample.clone().unwrap_or_default()
            ));
        }
    }
    Ok(op)
}

impl Operad {
    fn new(id: &str, tag: FieldTag, max_arity: usize, kind: OperadKind) -> Self {
        Operad {
            id: id.to_string(),
            tag,
            max_arity,
            kind,
            lie_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn is_com(&self) -> bool {
        matches!(self.kind, OperadKind::Com)
    }

    pub fn is_ass(&self) -> bool {
        matches!(self.kind, OperadKind::Ass)
    }

    pub fn is_lie(&self) -> bool {
        matches!(self.kind, OperadKind::Lie)
    }

    pub fn is_pointed(&self) -> bool {
        matches!(self.kind, OperadKind::Pointed(_))
    }

    pub fn pointed_algebra(&self) -> Option<&AssocAlgebra> {
        match &self.kind {
            OperadKind::Pointed(a) => Some(a),
            _ => None,
        }
    }

    /// The component `P(n)` as a based module.
    pub fn component(&self, n: usize) -> BasedModule {
        assert!(
            n <= self.max_arity,
            "arity {n} beyond the truncation bound {}",
            self.max_arity
        );
        match &self.kind {
            OperadKind::Com => BasedModule::new(vec![format!("c{n}")], self.tag),
            OperadKind::Ass => BasedModule::new(
                Permutation::all(n).iter().map(ass_symbol).collect(),
                self.tag,
            ),
            OperadKind::Lie => {
                if n == 0 {
                    BasedModule::new(vec![], self.tag)
                } else {
                    BasedModule::new(self.lie_arity(n).lc_syms.clone(), self.tag)
                }
            }
            OperadKind::Pointed(a) => {
                if n == 1 {
                    a.module.clone()
                } else {
                    BasedModule::new(vec![], self.tag)
                }
            }
            OperadKind::Table(t) => t.components[n].clone(),
        }
    }

    /// The operad unit `1_P ∈ P(1)`.
    pub fn unit(&self) -> OperadElement {
        let vec = match &self.kind {
            OperadKind::Com => Vector::term("c1", Scalar::one(self.tag)),
            OperadKind::Ass => Vector::term(
                &ass_symbol(&Permutation::identity(1)),
                Scalar::one(self.tag),
            ),
            OperadKind::Lie => Vector::term("l1", Scalar::one(self.tag)),
            OperadKind::Pointed(a) => a.unit.clone(),
            OperadKind::Table(t) => t.unit.clone(),
        };
        OperadElement { arity: 1, vec }
    }

    /// Whether the action of `Σ(n)` permutes basis symbols (up to nothing —
    /// no signs); `Com`, `Ass`, `A•` and trivial-action table operads
    /// qualify, `Lie` does not.
    pub fn action_is_monomial(&self) -> bool {
        match &self.kind {
            OperadKind::Com | OperadKind::Ass | OperadKind::Pointed(_) => true,
            OperadKind::Lie => false,
            OperadKind::Table(t) => t
                .action
                .values()
                .all(|v| v.support_len() <= 1 && v.iter().all(|(_, c)| c.is_one())),
        }
    }

    fn lie_arity(&self, n: usize) -> std::sync::Arc<LieArity> {
        assert!(n >= 1);
        let mut cache = self.lie_cache.lock().unwrap();
        if let Some(a) = cache.get(&n) {
            return a.clone();
        }
        let data = std::sync::Arc::new(build_lie_arity(n, self.tag));
        cache.insert(n, data.clone());
        data
    }

    /// Converts a combination of multilinear canonical Lyndon trees (leaves
    /// `"0"‥"n-1"`) into left-combed basis coordinates.
    fn lie_to_lc(&self, n: usize, comb: &lie::LieComb) -> Vector {
        let data = self.lie_arity(n);
        let mut out = Vector::zero();
        for (tree, c) in comb {
            let idx = data
                .lyndon
                .iter()
                .position(|t| t == tree)
                .expect("canonical tree in the Lyndon basis");
            out = out.add(&data.lyndon_in_lc[idx].scale(c));
        }
        out
    }

    /// The bracket tree of a left-combed basis symbol.
    fn lc_tree(&self, sym: &str) -> LieTree {
        lc_symbol_tree(sym)
    }
}

// --- symbol encodings ------------------------------------------------------

/// `Ass` basis symbol for a permutation: `"p"` + 1-based one-line images
/// joined by `.`, e.g. `"p2.1.3"`.
pub fn ass_symbol(p: &Permutation) -> String {
    let parts: Vec<String> = p.images().iter().map(|i| (i + 1).to_string()).collect();
    format!("p{}", parts.join("."))
}

/// Decodes an `Ass` basis symbol back to its permutation.
pub fn ass_perm(sym: &str) -> Permutation {
    let body = sym.strip_prefix('p').expect("Ass symbol");
    if body.is_empty() {
        return Permutation::identity(0);
    }
    Permutation::new(
        body.split('.')
            .map(|s| s.parse::<usize>().expect("Ass symbol digit") - 1)
            .collect(),
    )
}

/// Left-combed `Lie` basis symbol: `"l"` + the 1-based leaf order of the
/// right-nested bracket `[x_{σ(1)}, [x_{σ(2)}, … [x_{σ(n-1)}, x_n]…]]`.
pub fn lc_symbol(order: &[usize]) -> String {
    let parts: Vec<String> = order.iter().map(|i| (i + 1).to_string()).collect();
    format!("l{}", parts.join("."))
}

fn lc_symbol_order(sym: &str) -> Vec<usize> {
    sym.strip_prefix('l')
        .expect("Lie symbol")
        .split('.')
        .map(|s| s.parse::<usize>().expect("Lie symbol digit") - 1)
        .collect()
}

pub(crate) fn lc_symbol_tree(sym: &str) -> LieTree {
    let order = lc_symbol_order(sym);
    right_nested(&order)
}

/// The right-nested bracket tree with the given leaf positions.
fn right_nested(order: &[usize]) -> LieTree {
    assert!(!order.is_empty());
    let mut t = LieTree::leaf(&order[order.len() - 1].to_string());
    for &i in order[..order.len() - 1].iter().rev() {
        t = LieTree::node(LieTree::leaf(&i.to_string()), t);
    }
    t
}

fn position_rank(s: &str) -> usize {
    s.parse().expect("position leaf")
}

fn build_lie_arity(n: usize, tag: FieldTag) -> LieArity {
    // Multilinear Lyndon trees: standard bracketings of the Lyndon
    // arrangements of {0,…,n-1} (exactly the permutations that are Lyndon
    // words, i.e. those starting with 0), in lexicographic order.
    let lyndon: Vec<LieTree> = Permutation::all(n)
        .iter()
        .filter(|p| lie::is_lyndon(p.images()))
        .map(|p| {
            let names: Vec<String> = p.images().iter().map(|i| i.to_string()).collect();
            lie::standard_bracketing(&names, p.images())
        })
        .collect();
    // Left-combed trees: orders (σ(1),…,σ(n-1), n-1) with σ ∈ Σ(n-1).
    let mut lc_syms = Vec::new();
    let mut lc_orders = Vec::new();
    for p in Permutation::all(n - 1) {
        let mut order: Vec<usize> = p.images().to_vec();
        order.push(n - 1);
        lc_syms.push(lc_symbol(&order));
        lc_orders.push(order);
    }
    // Change of basis: expand each left-combed tree in the Lyndon basis,
    // then invert the (square) matrix column by column.
    let lyndon_syms: Vec<String> = (0..lyndon.len()).map(|i| format!("y{i}")).collect();
    let lyndon_mod = BasedModule::new(lyndon_syms.clone(), tag);
    let lc_mod = BasedModule::new(lc_syms.clone(), tag);
    let to_lyndon = LinearMap::from_fn(lc_mod.clone(), lyndon_mod.clone(), |sym| {
        let idx = lc_syms.iter().position(|s| s == sym).unwrap();
        let tree = right_nested(&lc_orders[idx]);
        let comb = lie::normalize(&tree, &position_rank, tag);
        let mut v = Vector::zero();
        for (t, c) in comb {
            let j = lyndon.iter().position(|u| *u == t).expect("Lyndon tree");
            v.add_term(&lyndon_syms[j], &c);
        }
        v
    });
    let lyndon_in_lc: Vec<Vector> = lyndon_syms
        .iter()
        .map(|s| {
            solve(&to_lyndon, &lyndon_mod.gen(s))
                .expect("left-combed brackets span the multilinear component")
        })
        .collect();
    LieArity {
        lyndon,
        lc_syms,
        lyndon_in_lc,
    }
}

// --- composition of permutations in Ass ------------------------------------

/// Operadic composition of permutations (the composition of the `Ass`
/// operad), 0-based slot: substitutes `τ` into slot `i` of `σ`.
pub fn perm_operad_compose(sigma: &Permutation, i: usize, tau: &Permutation) -> Permutation {
    let m = sigma.len();
    let n = tau.len();
    assert!(i < m);
    // Work with inverses: the composite's inverse one-line is the splice of
    // σ⁻¹'s one-line, replacing letter i with the block i + τ⁻¹ and shifting
    // larger letters by n-1.
    let sinv = sigma.inverse();
    let tinv = tau.inverse();
    let mut word = Vec::with_capacity(m + n - 1);
    for &a in sinv.images() {
        if a < i {
            word.push(a);
        } else if a == i {
            for &b in tinv.images() {
                word.push(i + b);
            }
        } else {
            word.push(a + n - 1);
        }
    }
    Permutation::new(word).inverse()
}

// --- the operad operations --------------------------------------------------

/// Right action `el · p` of `Σ(n)` on `P(n)`, extended linearly.
pub fn sigma_act(op: &Operad, el: &OperadElement, p: &Permutation) -> OperadElement {
    assert_eq!(el.arity, p.len(), "permutation size must match arity");
    let mut out = Vector::zero();
    for (sym, c) in el.vec.iter() {
        out = out.add(&sigma_act_basis(op, el.arity, sym, p).scale(c));
    }
    OperadElement {
        arity: el.arity,
        vec: out,
    }
}

fn sigma_act_basis(op: &Operad, arity: usize, sym: &str, p: &Permutation) -> Vector {
    match &op.kind {
        OperadKind::Com => Vector::term(sym, Scalar::one(op.tag)),
        OperadKind::Ass => {
            let composed = perm_compose(&ass_perm(sym), p);
            Vector::term(&ass_symbol(&composed), Scalar::one(op.tag))
        }
        OperadKind::Lie => {
            // Relabel leaf positions j ↦ p⁻¹(j) and renormalize; this is the
            // action matching the diagonal-orbit convention.
            let pinv = p.inverse();
            let tree = op.lc_tree(sym).map_leaves(&|s| {
                pinv.apply(position_rank(s)).to_string()
            });
            let comb = lie::normalize(&tree, &position_rank, op.tag);
            op.lie_to_lc(arity, &comb)
        }
        OperadKind::Pointed(_) => Vector::term(sym, Scalar::one(op.tag)),
        OperadKind::Table(t) => t
            .action
            .get(&(arity, sym.to_string(), p.images().to_vec()))
            .cloned()
            .unwrap_or_else(|| Vector::term(sym, Scalar::one(op.tag))),
    }
}

/// Partial composition `mu ∘ᵢ nu` with the public 1-based slot `i`.
pub fn partial_compose(
    op: &Operad,
    mu: &OperadElement,
    i: usize,
    nu: &OperadElement,
) -> OperadElement {
    assert!(
        i >= 1 && i <= mu.arity,
        "slot {i} out of range for arity {}",
        mu.arity
    );
    let result_arity = mu.arity + nu.arity - 1;
    assert!(
        result_arity <= op.max_arity,
        "composite arity {result_arity} beyond the truncation bound {}",
        op.max_arity
    );
    let mut out = Vector::zero();
    for (ms, mc) in mu.vec.iter() {
        for (ns, nc) in nu.vec.iter() {
            let col = pcompose_basis(op, mu.arity, ms, i - 1, nu.arity, ns);
            out = out.add(&col.scale(&(mc * nc)));
        }
    }
    OperadElement {
        arity: result_arity,
        vec: out,
    }
}

fn pcompose_basis(
    op: &Operad,
    m: usize,
    mu: &str,
    i: usize,
    n: usize,
    nu: &str,
) -> Vector {
    match &op.kind {
        OperadKind::Com => Vector::term(&format!("c{}", m + n - 1), Scalar::one(op.tag)),
        OperadKind::Ass => {
            let composed = perm_operad_compose(&ass_perm(mu), i, &ass_perm(nu));
            Vector::term(&ass_symbol(&composed), Scalar::one(op.tag))
        }
        OperadKind::Lie => {
            // Substitute the ν tree into leaf i of the μ tree, shifting
            // positions, then renormalize into the left-combed basis.
            let nu_tree = op.lc_tree(nu).map_leaves(&|s| {
                (position_rank(s) + i).to_string()
            });
            let mu_tree = op.lc_tree(mu);
            let grafted = graft(&mu_tree, i, n, &nu_tree);
            let comb = lie::normalize(&grafted, &position_rank, op.tag);
            op.lie_to_lc(m + n - 1, &comb)
        }
        OperadKind::Pointed(a) => {
            // Arity 1 throughout: composition is multiplication in A.
            a.product(
                &Vector::term(mu, Scalar::one(op.tag)),
                &Vector::term(nu, Scalar::one(op.tag)),
            )
        }
        OperadKind::Table(t) => t
            .pcompose
            .get(&(m, mu.to_string(), i, nu.to_string()))
            .cloned()
            .unwrap_or_default(),
    }
}

/// Replaces leaf position `i` of `t` with `replacement`, shifting leaf
/// positions greater than `i` by `n - 1`.
fn graft(t: &LieTree, i: usize, n: usize, replacement: &LieTree) -> LieTree {
    match t {
        LieTree::Leaf(s) => {
            let j = position_rank(s);
            if j == i {
                replacement.clone()
            } else if j > i {
                LieTree::Leaf((j + n - 1).to_string())
            } else {
                t.clone()
            }
        }
        LieTree::Node(l, r) => LieTree::node(
            graft(l, i, n, replacement),
            graft(r, i, n, replacement),
        ),
    }
}

/// Complete composition `μ(ν₁, …, ν_k)` via the iterated partial-composition
/// formula `(⋯((μ ∘_k ν_k) ∘_{k-1} ν_{k-1}) ⋯) ∘₁ ν₁`.
pub fn complete_compose(
    op: &Operad,
    mu: &OperadElement,
    nus: &[OperadElement],
) -> OperadElement {
    assert_eq!(
        nus.len(),
        mu.arity,
        "complete composition needs one argument per slot"
    );
    let mut acc = mu.clone();
    for (idx, nu) in nus.iter().enumerate().rev() {
        acc = partial_compose(op, &acc, idx + 1, nu);
    }
    acc
}

// --- morphisms ---------------------------------------------------------------

/// An operad morphism: per-arity linear maps `P(n) → P'(n)`.
pub struct OperadMorphism<'a> {
    pub source: &'a Operad,
    pub target: &'a Operad,
    /// `maps[n]` is the component map at arity `n`; the vector must cover
    /// every arity up to the bound the checks are run at.
    pub maps: Vec<LinearMap>,
}

impl OperadMorphism<'_> {
    pub fn apply(&self, el: &OperadElement) -> OperadElement {
        OperadElement {
            arity: el.arity,
            vec: self.maps[el.arity].apply(&el.vec),
        }
    }
}

/// The abelianization `Ass → Com`, `σ ↦ cₙ`.
pub fn abelianization<'a>(ass: &'a Operad, com: &'a Operad, max_arity: usize) -> OperadMorphism<'a> {
    assert!(ass.is_ass() && com.is_com());
    let maps = (0..=max_arity)
        .map(|n| {
            let dom = ass.component(n);
            let cod = com.component(n);
            LinearMap::from_fn(dom, cod.clone(), |_| cod.gen(&format!("c{n}")))
        })
        .collect();
    OperadMorphism {
        source: ass,
        target: com,
        maps,
    }
}

// --- axiom suites ------------------------------------------------------------

/// Checks the operad axioms (unit, action laws, sequential and parallel
/// associativity, equivariance) on all basis tuples up to `bound`.
pub fn check_operad_axioms(op: &Operad, bound: usize) -> Report {
    let mut report = Report::new("check-operad", &op.id, "operad axioms")
        .with_bounds(&format!("arity<={bound}"));
    let unit = op.unit();

    // Unit laws: 1 ∘₁ μ = μ and μ ∘ᵢ 1 = μ.
    for n in 0..=bound {
        for sym in op.component(n).basis() {
            let mu = OperadElement::basis(n, sym, op.tag);
            let left = partial_compose(op, &unit, 1, &mu);
            report.check(
                &format!("unit.left[{n}:{sym}]"),
                "operad unit law",
                left == mu,
                || format!("1∘₁{sym} = {left}"),
            );
            for i in 1..=n {
                let right = partial_compose(op, &mu, i, &unit);
                report.check(
                    &format!("unit.right[{n}:{sym}:{i}]"),
                    "operad unit law",
                    right == mu,
                    || format!("{sym}∘{i}1 = {right}"),
                );
            }
        }
    }

    // Action laws: x·id = x and (x·p)·q = x·(p∘q), over all p, q for n ≤ 3
    // and generators beyond.
    for n in 0..=bound.min(3) {
        let perms = Permutation::all(n);
        for sym in op.component(n).basis() {
            let x = OperadElement::basis(n, sym, op.tag);
            let id_act = sigma_act(op, &x, &Permutation::identity(n));
            report.check(
                &format!("action.id[{n}:{sym}]"),
                "right group action",
                id_act == x,
                || format!("{sym}·id = {id_act}"),
            );
            for p in &perms {
                for q in &perms {
                    let lhs = sigma_act(op, &sigma_act(op, &x, p), q);
                    let rhs = sigma_act(op, &x, &perm_compose(p, q));
                    report.check(
                        &format!("action.compose[{n}:{sym}:{p}:{q}]"),
                        "right group action",
                        lhs == rhs,
                        || format!("({sym}·{p})·{q} = {lhs} ≠ {rhs}"),
                    );
                }
            }
        }
    }

    // Sequential associativity: (λ ∘ᵢ μ) ∘_{i+j-1} ν = λ ∘ᵢ (μ ∘ⱼ ν).
    // Parallel commutativity: for i < k,
    // (λ ∘ₖ μ) ∘ᵢ ν = (λ ∘ᵢ ν) ∘_{k + arity(ν) - 1} μ.
    let tuples = basis_triples(op, bound);
    for (l, m, n) in &tuples {
        let (la, ls) = l;
        let (ma, ms) = m;
        let (na, ns) = n;
        let lam = OperadElement::basis(*la, ls, op.tag);
        let mu = OperadElement::basis(*ma, ms, op.tag);
        let nu = OperadElement::basis(*na, ns, op.tag);
        for i in 1..=*la {
            if la + ma + na - 2 > op.max_arity.min(bound + 2)
                || la + ma - 1 > op.max_arity
                || ma + na > op.max_arity + 1
                || la + na > op.max_arity + 1
            {
                continue;
            }
            for j in 1..=*ma {
                let lhs = partial_compose(op, &partial_compose(op, &lam, i, &mu), i + j - 1, &nu);
                let rhs = partial_compose(op, &lam, i, &partial_compose(op, &mu, j, &nu));
                report.check(
                    &format!("assoc.seq[{ls}:{i}:{ms}:{j}:{ns}]"),
                    "operad sequential associativity",
                    lhs == rhs,
                    || format!("({ls}∘{i}{ms})∘{}{ns} = {lhs} ≠ {rhs}", i + j - 1),
                );
            }
            for k in (i + 1)..=*la {
                let lhs = partial_compose(op, &partial_compose(op, &lam, k, &mu), i, &nu);
                let rhs =
                    partial_compose(op, &partial_compose(op, &lam, i, &nu), k + na - 1, &mu);
                report.check(
                    &format!("assoc.par[{ls}:{i}:{k}:{ms}:{ns}]"),
                    "operad parallel associativity",
                    lhs == rhs,
                    || format!("({ls}∘{k}{ms})∘{i}{ns} = {lhs} ≠ {rhs}"),
                );
            }
        }
    }

    // Equivariance: (μ·π) ∘ᵢ (ν·ρ) = (μ ∘_{π(i-1)+1} ν) · (π ∘ᵢ ρ), with the
    // Ass-composition of permutations as the composite reindexing.
    for m in 1..=bound.min(3) {
        for n in 0..=bound.min(3) {
            if m + n - 1 > op.max_arity || (m + n).max(1) - 1 > bound {
                continue;
            }
            for ms in op.component(m).basis() {
                for ns in op.component(n).basis() {
                    let mu = OperadElement::basis(m, ms, op.tag);
                    let nu = OperadElement::basis(n, ns, op.tag);
                    for pi in Permutation::all(m) {
                        for rho in Permutation::all(n) {
                            for i in 0..m {
                                let lhs = partial_compose(
                                    op,
                                    &sigma_act(op, &mu, &pi),
                                    i + 1,
                                    &sigma_act(op, &nu, &rho),
                                );
                                let composed = partial_compose(op, &mu, pi.apply(i) + 1, &nu);
                                let rhs = sigma_act(
                                    op,
                                    &composed,
                                    &perm_operad_compose(&pi, i, &rho),
                                );
                                report.check(
                                    &format!("equivariance[{ms}:{ns}:{pi}:{rho}:{i}]"),
                                    "operad equivariance",
                                    lhs == rhs,
                                    || format!("(μ·π)∘(ν·ρ): {lhs} ≠ {rhs}"),
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    report
}

/// An arity together with a basis symbol of that component.
type BasisSym = (usize, String);

/// All basis triples with composable arities within the bound.
fn basis_triples(op: &Operad, bound: usize) -> Vec<(BasisSym, BasisSym, BasisSym)> {
    let mut out = Vec::new();
    for la in 1..=bound {
        for ma in 0..=bound {
            for na in 0..=bound {
                if la + ma + na < 2 || la + ma + na - 2 > op.max_arity {
                    continue;
                }
                if ma == 0 && la < 1 {
                    continue;
                }
                for ls in op.component(la).basis() {
                    for ms in op.component(ma).basis() {
                        for ns in op.component(na).basis() {
                            out.push((
                                (la, ls.clone()),
                                (ma, ms.clone()),
                                (na, ns.clone()),
                            ));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Checks that `f` is an operad morphism: equivariant, unit-preserving,
/// composition-preserving, on basis tuples up to `bound`.
pub fn check_operad_morphism(f: &OperadMorphism<'_>, bound: usize) -> Report {
    let mut report = Report::new(
        "check-operad-morphism",
        &format!("{}->{}", f.source.id, f.target.id),
        "operad morphism laws",
    )
    .with_bounds(&format!("arity<={bound}"));

    // Unit preservation.
    let unit_img = f.apply(&f.source.unit());
    report.check(
        "morphism.unit",
        "operad morphisms preserve the distinguished element",
        unit_img == f.target.unit(),
        || format!("f(1) = {unit_img}"),
    );

    // Equivariance per arity.
    for n in 0..=bound.min(3) {
        for sym in f.source.component(n).basis() {
            let x = OperadElement::basis(n, sym, f.source.tag);
            for p in Permutation::all(n) {
                let lhs = f.apply(&sigma_act(f.source, &x, &p));
                let rhs = sigma_act(f.target, &f.apply(&x), &p);
                report.check(
                    &format!("morphism.equivariance[{n}:{sym}:{p}]"),
                    "operad morphisms are equivariant",
                    lhs == rhs,
                    || format!("f({sym}·{p}) = {lhs} ≠ {rhs}"),
                );
            }
        }
    }

    // Composition preservation.
    for m in 1..=bound {
        for n in 0..=bound {
            if m + n < 2 || m + n - 2 >= bound {
                continue;
            }
            for ms in f.source.component(m).basis() {
                for ns in f.source.component(n).basis() {
                    let mu = OperadElement::basis(m, ms, f.source.tag);
                    let nu = OperadElement::basis(n, ns, f.source.tag);
                    for i in 1..=m {
                        let lhs = f.apply(&partial_compose(f.source, &mu, i, &nu));
                        let rhs =
                            partial_compose(f.target, &f.apply(&mu), i, &f.apply(&nu));
                        report.check(
                            &format!("morphism.compose[{ms}:{i}:{ns}]"),
                            "operad morphisms preserve the partial compositions",
                            lhs == rhs,
                            || format!("f({ms}∘{i}{ns}) = {lhs} ≠ {rhs}"),
                        );
                    }
                }
            }
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldTag {
        FieldTag::Q
    }

    #[test]
    fn ass_symbol_round_trip() {
        for p in Permutation::all(3) {
            assert_eq!(ass_perm(&ass_symbol(&p)), p);
        }
        assert_eq!(ass_symbol(&Permutation::identity(0)), "p");
        assert_eq!(ass_perm("p"), Permutation::identity(0));
    }

    #[test]
    fn perm_operad_compose_units() {
        let id1 = Permutation::identity(1);
        for p in Permutation::all(3) {
            assert_eq!(perm_operad_compose(&id1, 0, &p), p);
            for i in 0..3 {
                assert_eq!(perm_operad_compose(&p, i, &id1), p);
            }
        }
    }

    #[test]
    fn component_dimensions() {
        let com = make_com(q());
        let ass = make_ass(q());
        let lie = make_lie(q());
        for n in 0..=4 {
            assert_eq!(com.component(n).dim(), 1);
            let fact: usize = (1..=n).product();
            assert_eq!(ass.component(n).dim(), fact.max(1));
        }
        assert_eq!(lie.component(0).dim(), 0);
        for n in 1..=4 {
            let fact: usize = (1..n).product();
            assert_eq!(lie.component(n).dim(), fact);
        }
    }

    #[test]
    fn lie_antisymmetry_via_action() {
        let lie = make_lie(q());
        let b = OperadElement::basis(2, "l1.2", q());
        let swapped = sigma_act(&lie, &b, &Permutation::transposition(2, 0, 1));
        assert_eq!(swapped, b.scale(&Scalar::from_int(-1, q())));
    }

    #[test]
    fn com_axioms() {
        let r = check_operad_axioms(&make_com(q()), 3);
        assert!(r.all_passed(), "{}", r.render_text());
    }

    #[test]
    fn ass_axioms() {
        let r = check_operad_axioms(&make_ass(q()), 3);
        assert!(r.all_passed(), "{}", r.render_text());
    }

    #[test]
    fn lie_axioms() {
        let r = check_operad_axioms(&make_lie(q()), 3);
        assert!(r.all_passed(), "{}", r.render_text());
    }

    #[test]
    fn pointed_axioms() {
        let op = make_pointed_operad(AssocAlgebra::dual_numbers(q()));
        let r = check_operad_axioms(&op, 3);
        assert!(r.all_passed(), "{}", r.render_text());
    }

    #[test]
    fn abelianization_is_a_morphism() {
        let ass = make_ass(q());
        let com = make_com(q());
        let f = abelianization(&ass, &com, 4);
        let r = check_operad_morphism(&f, 4);
        assert!(r.all_passed(), "{}", r.render_text());
    }

    /// A hand-built table copy of Com truncated at arity 2 passes
    /// verification; corrupting one composition entry is caught.
    #[test]
    fn table_operad_verification() {
        fn com_table() -> TableOperadData {
            let components = vec![
                BasedModule::from_names(&["e0"], FieldTag::Q),
                BasedModule::from_names(&["e1"], FieldTag::Q),
                BasedModule::from_names(&["e2"], FieldTag::Q),
            ];
            let one = Scalar::one(FieldTag::Q);
            let mut pcompose = BTreeMap::new();
            pcompose.insert((1, "e1".into(), 0, "e0".into()), Vector::term("e0", one.clone()));
            pcompose.insert((1, "e1".into(), 0, "e1".into()), Vector::term("e1", one.clone()));
            pcompose.insert((1, "e1".into(), 0, "e2".into()), Vector::term("e2", one.clone()));
            pcompose.insert((2, "e2".into(), 0, "e0".into()), Vector::term("e1", one.clone()));
            pcompose.insert((2, "e2".into(), 1, "e0".into()), Vector::term("e1", one.clone()));
            pcompose.insert((2, "e2".into(), 0, "e1".into()), Vector::term("e2", one.clone()));
            pcompose.insert((2, "e2".into(), 1, "e1".into()), Vector::term("e2", one.clone()));
            TableOperadData {
                components,
                unit: Vector::term("e1", one),
                action: BTreeMap::new(),
                pcompose,
            }
        }
        assert!(make_table_operad("tcom", FieldTag::Q, com_table(), true).is_ok());
        let mut bad = com_table();
        bad.pcompose.insert(
            (2, "e2".into(), 1, "e0".into()),
            Vector::term("e1", Scalar::from_int(2, FieldTag::Q)),
        );
        assert!(make_table_operad("tbad", FieldTag::Q, bad, true).is_err());
    }

    /// Complete composition agrees with the semantic word model in Ass:
    /// composing σ with the identities recovers σ.
    #[test]
    fn complete_compose_with_units() {
        let ass = make_ass(q());
        let unit = ass.unit();
        for p in Permutation::all(3) {
            let mu = OperadElement::basis(3, &ass_symbol(&p), q());
            let nus = vec![unit.clone(), unit.clone(), unit.clone()];
            assert_eq!(complete_compose(&ass, &mu, &nus), mu);
        }
    }
}
