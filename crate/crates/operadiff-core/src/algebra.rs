//! Finite-dimensional `P`-algebras by structure constants.
//!
//! An algebra is specified on the *generating* operations of its operad only
//! (arity-0 constants and the binary operation for `Com`/`Ass`/`Lie`; the
//! arity-1 action for `A•`; full tables for table operads); evaluation of an
//! arbitrary operad element is derived through operad composition, and
//! [`check_algebra_axioms`] verifies up to an arity bound that the derived
//! evaluator is consistent with every partial composition — that is the
//! soundness gate for the generating-table design.
//!
//! On top of evaluation the module builds the tangent bundle `A ⋉ A` (and its
//! fibered powers `A ⋉ Aⁿ`) with the Leibniz structure, the seven tangent
//! structure maps with their full equation suite, derivations and vector
//! fields with the Leibniz linear solver, and the two differential-object
//! criteria (higher operations vanish vs. evaluation factors through the
//! differential), which are always computed by both routes and compared.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::free::{canonicalize, diff_transform, dist_law, FreeElement, FreeTerm};
use crate::lie::LieTree;
use crate::linalg::{
    product_module, solve_kernel, split_tag, tagged, BasedModule, LinearMap, Vector,
};
use crate::operad::{
    ass_perm, ass_symbol, make_ass, make_com, make_lie, make_pointed_operad, partial_compose,
    AssocAlgebra, Operad, OperadElement,
};
use crate::perm::{perm_act_word, Permutation};
use crate::report::Report;
use crate::scalar::{FieldTag, Scalar};

/// A finite-dimensional `P`-algebra given by structure constants on the
/// generating operations of `P`.
///
/// `tables` maps `(arity, operad basis symbol, carrier basis tuple)` to the
/// value vector; missing entries are zero.  For `Com` the keys are
/// `(0, "c0", [])` and `(2, "c2", [a, b])`; for `Ass` they are `(0, "p", [])`
/// and `(2, "p1.2", [a, b])`; for `Lie` just `(2, "l1.2", [a, b])`; for `A•`
/// the arity-1 action `(1, alg_sym, [m])`; table operads carry one table per
/// operad basis operation.
#[derive(Debug, Clone)]
pub struct PAlgebra {
    pub id: String,
    pub operad: Arc<Operad>,
    pub carrier: BasedModule,
    pub tables: BTreeMap<(usize, String, Vec<String>), Vector>,
}

fn com_binary() -> String {
    "c2".to_string()
}

fn ass_binary() -> String {
    ass_symbol(&Permutation::identity(2))
}

fn lie_binary() -> String {
    "l1.2".to_string()
}

/// Multilinear expansion of a tuple of vectors into basis words with their
/// coefficient products.
fn expand(args: &[&Vector], tag: FieldTag) -> Vec<(Vec<String>, Scalar)> {
    let mut partial: Vec<(Vec<String>, Scalar)> = vec![(Vec::new(), Scalar::one(tag))];
    for a in args {
        let mut next = Vec::new();
        for (prefix, c) in &partial {
            for (s, cs) in a.iter() {
                let mut p = prefix.clone();
                p.push(s.clone());
                next.push((p, c * cs));
            }
        }
        partial = next;
    }
    partial
}

impl PAlgebra {
    /// Raw constructor from explicit generating tables.
    pub fn from_tables(
        id: &str,
        operad: Arc<Operad>,
        carrier: BasedModule,
        tables: BTreeMap<(usize, String, Vec<String>), Vector>,
    ) -> PAlgebra {
        for ((arity, _, tuple), val) in &tables {
            assert_eq!(*arity, tuple.len(), "table key arity mismatch");
            for s in tuple {
                assert!(carrier.contains(s), "table input {s:?} outside the carrier");
            }
            for (s, _) in val.iter() {
                assert!(carrier.contains(s), "table value {s:?} outside the carrier");
            }
        }
        PAlgebra {
            id: id.to_string(),
            operad,
            carrier,
            tables,
        }
    }

    /// A commutative algebra as a `Com`-algebra.  Panics if the product
    /// table is not symmetric.
    pub fn com_from_assoc(id: &str, operad: Arc<Operad>, alg: &AssocAlgebra) -> PAlgebra {
        assert!(operad.is_com(), "expected the Com operad");
        let mut tables = BTreeMap::new();
        tables.insert((0, "c0".to_string(), Vec::new()), alg.unit.clone());
        for a in alg.module.basis() {
            for b in alg.module.basis() {
                let ab = alg.product(&alg.module.gen(a), &alg.module.gen(b));
                let ba = alg.product(&alg.module.gen(b), &alg.module.gen(a));
                assert_eq!(ab, ba, "non-commutative table passed to Com ({a},{b})");
                tables.insert((2, com_binary(), vec![a.clone(), b.clone()]), ab);
            }
        }
        PAlgebra::from_tables(id, operad, alg.module.clone(), tables)
    }

    /// A unital associative algebra as an `Ass`-algebra.
    pub fn ass_from_assoc(id: &str, operad: Arc<Operad>, alg: &AssocAlgebra) -> PAlgebra {
        assert!(operad.is_ass(), "expected the Ass operad");
        let mut tables = BTreeMap::new();
        tables.insert((0, "p".to_string(), Vec::new()), alg.unit.clone());
        for a in alg.module.basis() {
            for b in alg.module.basis() {
                let ab = alg.product(&alg.module.gen(a), &alg.module.gen(b));
                tables.insert((2, ass_binary(), vec![a.clone(), b.clone()]), ab);
            }
        }
        PAlgebra::from_tables(id, operad, alg.module.clone(), tables)
    }

    /// A Lie algebra from its bracket table.  The table may list each pair
    /// once; the antisymmetric completion is filled in, and any explicit
    /// entries violating antisymmetry (or a nonzero diagonal) panic.
    pub fn lie_from_bracket(
        id: &str,
        operad: Arc<Operad>,
        carrier: BasedModule,
        bracket: &BTreeMap<(String, String), Vector>,
    ) -> PAlgebra {
        assert!(operad.is_lie(), "expected the Lie operad");
        let mut full: BTreeMap<(String, String), Vector> = BTreeMap::new();
        for ((a, b), v) in bracket {
            assert!(
                a != b || v.is_zero(),
                "nonzero diagonal bracket [{a},{a}]"
            );
            full.insert((a.clone(), b.clone()), v.clone());
        }
        for ((a, b), v) in bracket {
            let flip = (b.clone(), a.clone());
            match full.get(&flip) {
                Some(w) => assert_eq!(*w, v.neg(), "bracket table is not antisymmetric"),
                None => {
                    full.insert(flip, v.neg());
                }
            }
        }
        let mut tables = BTreeMap::new();
        for ((a, b), v) in full {
            tables.insert((2, lie_binary(), vec![a, b]), v);
        }
        PAlgebra::from_tables(id, operad, carrier, tables)
    }

    /// An `A•`-algebra, i.e. an `A`-module: the action of every algebra basis
    /// element on every carrier basis element.
    pub fn pointed_module(
        id: &str,
        operad: Arc<Operad>,
        carrier: BasedModule,
        action: &BTreeMap<(String, String), Vector>,
    ) -> PAlgebra {
        assert!(operad.is_pointed(), "expected a pointed operad");
        let mut tables = BTreeMap::new();
        for ((a, m), v) in action {
            tables.insert((1, a.clone(), vec![m.clone()]), v.clone());
        }
        PAlgebra::from_tables(id, operad, carrier, tables)
    }

    fn table_lookup(&self, arity: usize, sym: &str, tuple: &[String]) -> Vector {
        self.tables
            .get(&(arity, sym.to_string(), tuple.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    /// Multilinear application of one generating table.
    fn table_apply(&self, arity: usize, sym: &str, args: &[&Vector]) -> Vector {
        let mut out = Vector::zero();
        for (word, c) in expand(args, self.operad.tag) {
            out = out.add(&self.table_lookup(arity, sym, &word).scale(&c));
        }
        out
    }

    fn eval_lie_tree(&self, t: &LieTree) -> Vector {
        match t {
            LieTree::Leaf(s) => self.carrier.gen(s),
            LieTree::Node(l, r) => {
                let lv = self.eval_lie_tree(l);
                let rv = self.eval_lie_tree(r);
                self.table_apply(2, &lie_binary(), &[&lv, &rv])
            }
        }
    }

    /// Evaluates one canonical free-algebra term whose letters are carrier
    /// basis symbols.
    pub fn eval_term(&self, term: &FreeTerm) -> Vector {
        for w in &term.word {
            assert!(self.carrier.contains(w), "letter {w:?} outside the carrier");
        }
        let op = &self.operad;
        let n = term.arity();
        if op.is_com() {
            if n == 0 {
                return self.table_lookup(0, "c0", &[]);
            }
            let mut v = self.carrier.gen(&term.word[0]);
            for w in &term.word[1..] {
                let g = self.carrier.gen(w);
                v = self.table_apply(2, &com_binary(), &[&v, &g]);
            }
            v
        } else if op.is_ass() {
            if n == 0 {
                return self.table_lookup(0, "p", &[]);
            }
            // θ(σ; w) = θ(id; w′) with w′[i] = w[σ⁻¹(i)]: reorder, then fold
            // the binary product left to right.
            let sigma = ass_perm(&term.op);
            let word = perm_act_word(&sigma.inverse(), &term.word);
            let mut v = self.carrier.gen(&word[0]);
            for w in &word[1..] {
                let g = self.carrier.gen(w);
                v = self.table_apply(2, &ass_binary(), &[&v, &g]);
            }
            v
        } else if op.is_lie() {
            let tree = LieTree::from_shape(&term.op, &term.word).expect("canonical Lie shape");
            self.eval_lie_tree(&tree)
        } else if op.is_pointed() {
            self.table_lookup(1, &term.op, &term.word)
        } else {
            self.table_lookup(n, &term.op, &term.word)
        }
    }

    /// Evaluates a free-algebra element whose letters are carrier symbols.
    pub fn eval_free(&self, el: &FreeElement) -> Vector {
        let mut out = Vector::zero();
        for (t, c) in el.iter() {
            out = out.add(&self.eval_term(t).scale(c));
        }
        out
    }

    /// The derived evaluator `θ(μ; a₁,…,aₙ)`: multilinear expansion into
    /// carrier basis words, canonical orbit normal form, then the generating
    /// tables through operad composition.
    pub fn evaluate(&self, mu: &OperadElement, args: &[Vector]) -> Vector {
        assert_eq!(mu.arity, args.len(), "argument count mismatch");
        let refs: Vec<&Vector> = args.iter().collect();
        let mut out = Vector::zero();
        for (word, c) in expand(&refs, self.operad.tag) {
            let el = canonicalize(&self.operad, mu, &word);
            out = out.add(&self.eval_free(&el).scale(&c));
        }
        out
    }

    /// The tangent bundle `A ⋉ A`: carrier `A × A` with the Leibniz
    /// structure `μ((a₁,b₁),…) = (μ(a₁,…,aₙ), Σᵢ μ(a₁,…,bᵢ,…,aₙ))`.
    pub fn tangent_bundle(&self) -> PAlgebra {
        self.tangent_power(1)
    }

    /// The fibered power `A ⋉ Aⁿ` with one base component (tag `0`) and `n`
    /// tangent components (tags `1..=n`), each obeying the Leibniz formula.
    pub fn tangent_power(&self, n: usize) -> PAlgebra {
        let parts: Vec<&BasedModule> = std::iter::repeat_n(&self.carrier, n + 1).collect();
        let carrier = product_module(&parts);
        let mut tables = BTreeMap::new();
        for ((arity, sym, tuple), val) in &self.tables {
            let base_key: Vec<String> = tuple.iter().map(|s| tagged(0, s)).collect();
            tables.insert(
                (*arity, sym.clone(), base_key.clone()),
                val.map_symbols(|s| tagged(0, s)),
            );
            for j in 1..=n {
                for i in 0..*arity {
                    let mut key = base_key.clone();
                    key[i] = tagged(j, &tuple[i]);
                    tables.insert(
                        (*arity, sym.clone(), key),
                        val.map_symbols(|s| tagged(j, s)),
                    );
                }
            }
        }
        PAlgebra {
            id: if n == 1 {
                format!("T({})", self.id)
            } else {
                format!("{}⋉A^{n}", self.id)
            },
            operad: self.operad.clone(),
            carrier,
            tables,
        }
    }
}

/// A linear map between carriers claimed to respect the algebra structures.
#[derive(Debug, Clone)]
pub struct AlgebraMorphism {
    pub source: PAlgebra,
    pub target: PAlgebra,
    pub map: LinearMap,
}

impl AlgebraMorphism {
    pub fn identity(a: &PAlgebra) -> AlgebraMorphism {
        AlgebraMorphism {
            source: a.clone(),
            target: a.clone(),
            map: LinearMap::identity(&a.carrier),
        }
    }
}

/// Verifies the algebra laws `θ∘η = id` and `θ∘S(θ) = θ∘γ` (the latter as
/// consistency of the derived evaluator with every partial composition) on
/// all basis tuples up to `bound`.
pub fn check_algebra_axioms(a: &PAlgebra, bound: usize) -> Report {
    let op = &a.operad;
    let mut r = Report::new("check-algebra", &op.id, &a.id)
        .with_bounds(&format!("arity<={bound}"));
    // Unit law.
    let mut unit_ok = true;
    let mut unit_wit = String::new();
    for s in a.carrier.basis() {
        let v = a.carrier.gen(s);
        let got = a.evaluate(&op.unit(), std::slice::from_ref(&v));
        if got != v && unit_ok {
            unit_ok = false;
            unit_wit = format!("1_P({s}) = {got}");
        }
    }
    r.check("algebra.unit", "P-algebra unit law", unit_ok, || unit_wit);
    // Composition law: θ(μ ∘ᵢ ν; a⃗) = θ(μ; …, θ(ν; block), …).
    let bound = bound.min(op.max_arity);
    let mut comp_ok = true;
    let mut comp_wit = String::new();
    'outer: for k in 1..=bound {
        for m in 0..=bound {
            if k + m < 1 || k + m - 1 > bound {
                continue;
            }
            let pk = op.component(k);
            let pm = op.component(m);
            for mu_sym in pk.basis() {
                let mu = OperadElement::basis(k, mu_sym, op.tag);
                for nu_sym in pm.basis() {
                    let nu = OperadElement::basis(m, nu_sym, op.tag);
                    for i in 1..=k {
                        let composite = partial_compose(op, &mu, i, &nu);
                        let total = k + m - 1;
                        for word in tuples(&a.carrier, total) {
                            let gens: Vec<Vector> =
                                word.iter().map(|s| a.carrier.gen(s)).collect();
                            let lhs = a.evaluate(&composite, &gens);
                            let inner =
                                a.evaluate(&nu, &gens[i - 1..i - 1 + m]);
                            let mut outer_args: Vec<Vector> = Vec::new();
                            outer_args.extend_from_slice(&gens[..i - 1]);
                            outer_args.push(inner);
                            outer_args.extend_from_slice(&gens[i - 1 + m..]);
                            let rhs = a.evaluate(&mu, &outer_args);
                            if lhs != rhs {
                                comp_ok = false;
                                comp_wit = format!(
                                    "θ(({mu_sym} ∘_{i} {nu_sym}); {}) = {lhs} ≠ {rhs}",
                                    word.join(",")
                                );
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    r.check(
        "algebra.composition",
        "P-algebra evaluation respects operad composition",
        comp_ok,
        || comp_wit,
    );
    r
}

/// All basis words of the given length over a module's basis.
fn tuples(module: &BasedModule, len: usize) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &out {
            for s in module.basis() {
                let mut w2 = w.clone();
                w2.push(s.clone());
                next.push(w2);
            }
        }
        out = next;
    }
    out
}

/// Verifies `f(μ(a₁,…,aₙ)) = μ(f a₁,…,f aₙ)` on all basis operations and
/// basis tuples up to `bound`.
pub fn check_morphism(f: &AlgebraMorphism, bound: usize) -> Report {
    let op = &f.source.operad;
    let mut r = Report::new(
        "check-morphism",
        &op.id,
        &format!("{} -> {}", f.source.id, f.target.id),
    )
    .with_bounds(&format!("arity<={bound}"));
    r.check(
        "morphism.modules",
        "domain and codomain match the carriers",
        f.map.domain == f.source.carrier
            && f.map.codomain == f.target.carrier
            && op.id == f.target.operad.id,
        || "carrier mismatch".to_string(),
    );
    let bound = bound.min(op.max_arity);
    let mut ok = true;
    let mut wit = String::new();
    'outer: for n in 0..=bound {
        let pn = op.component(n);
        for mu_sym in pn.basis() {
            let mu = OperadElement::basis(n, mu_sym, op.tag);
            for word in tuples(&f.source.carrier, n) {
                let gens: Vec<Vector> = word.iter().map(|s| f.source.carrier.gen(s)).collect();
                let lhs = f.map.apply(&f.source.evaluate(&mu, &gens));
                let images: Vec<Vector> = gens.iter().map(|v| f.map.apply(v)).collect();
                let rhs = f.target.evaluate(&mu, &images);
                if lhs != rhs {
                    ok = false;
                    wit = format!("f({mu_sym}; {}) = {lhs} ≠ {rhs}", word.join(","));
                    break 'outer;
                }
            }
        }
    }
    r.check(
        "morphism.structure",
        "morphism commutes with evaluation",
        ok,
        || wit,
    );
    r
}

// ---------------------------------------------------------------------------
// Tangent structure maps.
// ---------------------------------------------------------------------------

/// The seven tangent structure maps of `A`, packaged as algebra morphisms:
/// projection `p`, zero section `z`, fiber addition `s`, the two pullback
/// projections `q₁, q₂`, vertical lift `l`, canonical flip `c`, and the
/// fibrewise negation `n`.
#[derive(Debug, Clone)]
pub struct TangentMaps {
    /// `p : T(A) → A`, `(a,b) ↦ a`.
    pub p: AlgebraMorphism,
    /// `z : A → T(A)`, `a ↦ (a,0)`.
    pub z: AlgebraMorphism,
    /// `s : A⋉A² → T(A)`, `(a,b₁,b₂) ↦ (a, b₁+b₂)`.
    pub s: AlgebraMorphism,
    /// `qⱼ : A⋉A² → T(A)`, `(a,b₁,b₂) ↦ (a,bⱼ)`, for `j = 1, 2`.
    pub q: Vec<AlgebraMorphism>,
    /// `l : T(A) → T²(A)`, `(a,b) ↦ (a,0,0,b)`.
    pub l: AlgebraMorphism,
    /// `c : T²(A) → T²(A)`, `(a,b,c,d) ↦ (a,c,b,d)`.
    pub c: AlgebraMorphism,
    /// `n : T(A) → T(A)`, `(a,b) ↦ (a,−b)`.
    pub n: AlgebraMorphism,
}

fn morphism(source: &PAlgebra, target: &PAlgebra, f: impl Fn(&str) -> Vector) -> AlgebraMorphism {
    AlgebraMorphism {
        source: source.clone(),
        target: target.clone(),
        map: LinearMap::from_fn(source.carrier.clone(), target.carrier.clone(), f),
    }
}

/// Builds the seven structure maps from their closed formulas.
pub fn tangent_maps(a: &PAlgebra) -> TangentMaps {
    let one = Scalar::one(a.operad.tag);
    let t = a.tangent_bundle();
    let t2 = t.tangent_bundle();
    let tp2 = a.tangent_power(2);
    let p = morphism(&t, a, |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        if i == 0 {
            a.carrier.gen(rest)
        } else {
            Vector::zero()
        }
    });
    let z = morphism(a, &t, |s| Vector::term(&tagged(0, s), one.clone()));
    let s_map = morphism(&tp2, &t, |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        Vector::term(&tagged(if i == 0 { 0 } else { 1 }, rest), one.clone())
    });
    let q: Vec<AlgebraMorphism> = (1..=2)
        .map(|j| {
            morphism(&tp2, &t, |s| {
                let (i, rest) = split_tag(s).expect("tangent symbol");
                if i == 0 {
                    Vector::term(&tagged(0, rest), one.clone())
                } else if i == j {
                    Vector::term(&tagged(1, rest), one.clone())
                } else {
                    Vector::zero()
                }
            })
        })
        .collect();
    let l = morphism(&t, &t2, |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        Vector::term(&tagged(i, &tagged(i, rest)), one.clone())
    });
    let c = morphism(&t2, &t2, |s| {
        let (i, inner) = split_tag(s).expect("tangent symbol");
        let (j, rest) = split_tag(inner).expect("tangent symbol");
        Vector::term(&tagged(j, &tagged(i, rest)), one.clone())
    });
    let n = morphism(&t, &t, |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        let v = Vector::term(&tagged(i, rest), one.clone());
        if i == 0 {
            v
        } else {
            v.neg()
        }
    });
    TangentMaps {
        p,
        z,
        s: s_map,
        q,
        l,
        c,
        n,
    }
}

/// `T(f)`: the tangent functor applied to a morphism, `i#a ↦ i#f(a)`.
pub fn tangent_morphism(f: &AlgebraMorphism) -> AlgebraMorphism {
    let ts = f.source.tangent_bundle();
    let tt = f.target.tangent_bundle();
    let map = LinearMap::from_fn(ts.carrier.clone(), tt.carrier.clone(), |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        f.map
            .apply(&f.source.carrier.gen(rest))
            .map_symbols(|x| tagged(i, x))
    });
    AlgebraMorphism {
        source: ts,
        target: tt,
        map,
    }
}

/// `T₂(f)`: the fibered-power functor on morphisms, componentwise.
pub fn tangent_power_morphism(f: &AlgebraMorphism, n: usize) -> AlgebraMorphism {
    let ts = f.source.tangent_power(n);
    let tt = f.target.tangent_power(n);
    let map = LinearMap::from_fn(ts.carrier.clone(), tt.carrier.clone(), |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        f.map
            .apply(&f.source.carrier.gen(rest))
            .map_symbols(|x| tagged(i, x))
    });
    AlgebraMorphism {
        source: ts,
        target: tt,
        map,
    }
}

/// Verifies that the semi-direct tangent bundle agrees with the distributive-
/// law lift `(θ×θ)∘λ` on all basis operations and tangent basis tuples up to
/// `bound`.
pub fn check_tangent_lift(a: &PAlgebra, bound: usize) -> Report {
    let op = &a.operad;
    let t = a.tangent_bundle();
    let mut r = Report::new("tangent-lift", &op.id, &a.id)
        .with_bounds(&format!("arity<={bound}"));
    let bound = bound.min(op.max_arity);
    let mut ok = true;
    let mut wit = String::new();
    'outer: for n in 0..=bound {
        let pn = op.component(n);
        for mu_sym in pn.basis() {
            let mu = OperadElement::basis(n, mu_sym, op.tag);
            for word in tuples(&t.carrier, n) {
                let gens: Vec<Vector> = word.iter().map(|s| t.carrier.gen(s)).collect();
                let lhs = t.evaluate(&mu, &gens);
                let el = canonicalize(op, &mu, &word);
                let (base, tan) = dist_law(op, &el);
                let rhs = a
                    .eval_free(&base)
                    .map_symbols(|s| tagged(0, s))
                    .add(&a.eval_free(&tan).map_symbols(|s| tagged(1, s)));
                if lhs != rhs {
                    ok = false;
                    wit = format!("({mu_sym}; {}): {lhs} ≠ {rhs}", word.join(","));
                    break 'outer;
                }
            }
        }
    }
    r.check(
        "tangent.lift",
        "semi-direct tangent bundle equals the distributive-law lift",
        ok,
        || wit,
    );
    r
}

fn eq_maps(r: &mut Report, name: &str, paper_ref: &str, lhs: &LinearMap, rhs: &LinearMap) {
    let wit = lhs
        .domain
        .basis()
        .iter()
        .find(|s| lhs.column(s) != rhs.column(s))
        .map(|s| format!("on {s}: {} ≠ {}", lhs.column(s), rhs.column(s)))
        .unwrap_or_default();
    r.check(name, paper_ref, lhs == rhs, || wit);
}

/// Runs the full tangent-category equation suite with the canonical maps.
pub fn check_tangent_equations(
    a: &PAlgebra,
    morphisms: &[AlgebraMorphism],
    bound: usize,
) -> Report {
    check_tangent_equations_with(a, &tangent_maps(a), morphisms, bound)
}

/// As [`check_tangent_equations`], but on caller-supplied structure maps —
/// used by the mutation tests, which swap one map for a broken variant and
/// expect a reported counterexample.
pub fn check_tangent_equations_with(
    a: &PAlgebra,
    tm: &TangentMaps,
    morphisms: &[AlgebraMorphism],
    bound: usize,
) -> Report {
    let op = &a.operad;
    let one = Scalar::one(op.tag);
    let mut r = Report::new("tangent-check", &op.id, &a.id)
        .with_bounds(&format!("arity<={bound}"));
    let t = a.tangent_bundle();
    let t2 = t.tangent_bundle();
    let tp2 = a.tangent_power(2);
    let tp3 = a.tangent_power(3);
    let sdr = "semi-direct tangent structure maps";
    let teq = "tangent category equations";

    // Each structure map is an algebra morphism.
    for (name, f) in [
        ("p", &tm.p),
        ("z", &tm.z),
        ("s", &tm.s),
        ("q1", &tm.q[0]),
        ("q2", &tm.q[1]),
        ("l", &tm.l),
        ("c", &tm.c),
        ("n", &tm.n),
    ] {
        let inner = check_morphism(f, bound.min(3));
        let wit = inner
            .failures()
            .next()
            .and_then(|c| c.counterexample.clone())
            .unwrap_or_default();
        r.check(
            &format!("tangent.morphism.{name}"),
            sdr,
            inner.all_passed(),
            || wit,
        );
    }

    // Derived maps, built from the supplied structure maps so mutations
    // propagate.
    let tp = tangent_morphism(&tm.p);
    let tc = tangent_morphism(&tm.c);
    let tl = tangent_morphism(&tm.l);
    // Outer projection, flip, and lift of the algebra T(A) itself.
    let p_t = LinearMap::from_fn(t2.carrier.clone(), t.carrier.clone(), |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        if i == 0 {
            t.carrier.gen(rest)
        } else {
            Vector::zero()
        }
    });
    let t3m = t2.tangent_bundle();
    let c_t = LinearMap::from_fn(t3m.carrier.clone(), t3m.carrier.clone(), |s| {
        let (i, inner) = split_tag(s).expect("tangent symbol");
        let (j, rest) = split_tag(inner).expect("tangent symbol");
        Vector::term(&tagged(j, &tagged(i, rest)), one.clone())
    });
    let l_t = LinearMap::from_fn(t2.carrier.clone(), t3m.carrier.clone(), |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        Vector::term(&tagged(i, &tagged(i, rest)), one.clone())
    });
    // Auxiliary re-indexing maps between the fibered powers.
    let swap12 = LinearMap::from_fn(tp2.carrier.clone(), tp2.carrier.clone(), |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        let j = match i {
            1 => 2,
            2 => 1,
            _ => i,
        };
        Vector::term(&tagged(j, rest), one.clone())
    });
    // u = ⟨1, z∘p⟩ : T(A) → A⋉A², (a,b) ↦ (a,b,0); u2 puts b in the second
    // fiber slot instead.
    let u1 = LinearMap::from_fn(t.carrier.clone(), tp2.carrier.clone(), |s| {
        Vector::term(s, one.clone())
    });
    let u2 = LinearMap::from_fn(t.carrier.clone(), tp2.carrier.clone(), |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        Vector::term(&tagged(if i == 1 { 2 } else { 0 }, rest), one.clone())
    });
    // s applied to fibers (1,2) resp. (2,3) of A⋉A³.
    let s12 = LinearMap::from_fn(tp3.carrier.clone(), tp2.carrier.clone(), |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        let j = match i {
            0 => 0,
            1 | 2 => 1,
            _ => 2,
        };
        Vector::term(&tagged(j, rest), one.clone())
    });
    let s23 = LinearMap::from_fn(tp3.carrier.clone(), tp2.carrier.clone(), |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        let j = match i {
            0 => 0,
            1 => 1,
            _ => 2,
        };
        Vector::term(&tagged(j, rest), one.clone())
    });
    // ⟨1, n⟩ : T(A) → A⋉A², x ↦ (p(x), π₂(x), π₂(n(x))).
    let pair1n = LinearMap::from_fn(t.carrier.clone(), tp2.carrier.clone(), |s| {
        let mut out = Vector::zero();
        for (sym, c) in tm.p.map.column(s).iter() {
            out.add_term(&tagged(0, sym), c);
        }
        let (i, rest) = split_tag(s).expect("tangent symbol");
        if i == 1 {
            out.add_term(&tagged(1, rest), &one);
        }
        for (sym, c) in tm.n.map.column(s).iter() {
            let (j, inner) = split_tag(sym).expect("tangent symbol");
            if j == 1 {
                out.add_term(&tagged(2, inner), c);
            }
        }
        out
    });

    let id_a = LinearMap::identity(&a.carrier);
    let id_t = LinearMap::identity(&t.carrier);
    let zp = tm.z.map.compose(&tm.p.map);

    eq_maps(&mut r, "tangent.p-z", teq, &tm.p.map.compose(&tm.z.map), &id_a);
    eq_maps(
        &mut r,
        "tangent.p-s",
        teq,
        &tm.p.map.compose(&tm.s.map),
        &tm.p.map.compose(&tm.q[0].map),
    );
    eq_maps(
        &mut r,
        "tangent.p-q",
        teq,
        &tm.p.map.compose(&tm.q[0].map),
        &tm.p.map.compose(&tm.q[1].map),
    );
    eq_maps(
        &mut r,
        "tangent.s-commutative",
        teq,
        &tm.s.map.compose(&swap12),
        &tm.s.map,
    );
    eq_maps(&mut r, "tangent.s-unit", teq, &tm.s.map.compose(&u1), &id_t);
    eq_maps(
        &mut r,
        "tangent.s-associative",
        teq,
        &tm.s.map.compose(&s12),
        &tm.s.map.compose(&s23),
    );
    eq_maps(
        &mut r,
        "tangent.q-projections",
        teq,
        &tm.q[0].map.compose(&u1),
        &id_t,
    );
    eq_maps(
        &mut r,
        "tangent.q-projections-2",
        teq,
        &tm.q[1].map.compose(&u2),
        &id_t,
    );
    eq_maps(
        &mut r,
        "tangent.q-zero",
        teq,
        &tm.q[1].map.compose(&u1),
        &zp,
    );
    eq_maps(&mut r, "tangent.l-section", teq, &p_t.compose(&tm.l.map), &zp);
    eq_maps(
        &mut r,
        "tangent.l-projection",
        teq,
        &tp.map.compose(&tm.l.map),
        &zp,
    );
    eq_maps(
        &mut r,
        "tangent.c-involution",
        teq,
        &tm.c.map.compose(&tm.c.map),
        &LinearMap::identity(&t2.carrier),
    );
    eq_maps(
        &mut r,
        "tangent.c-lift",
        teq,
        &tm.c.map.compose(&tm.l.map),
        &tm.l.map,
    );
    eq_maps(
        &mut r,
        "tangent.c-braid",
        teq,
        &tc.map.compose(&c_t.compose(&tc.map)),
        &c_t.compose(&tc.map.compose(&c_t)),
    );
    eq_maps(
        &mut r,
        "tangent.l-coassociative",
        teq,
        &tl.map.compose(&tm.l.map),
        &l_t.compose(&tm.l.map),
    );
    eq_maps(
        &mut r,
        "tangent.c-projection",
        teq,
        &tp.map.compose(&tm.c.map),
        &p_t,
    );
    eq_maps(
        &mut r,
        "tangent.negation-inverse",
        teq,
        &tm.s.map.compose(&pair1n),
        &zp,
    );

    // Naturality against the supplied endomorphisms.
    let mut nat_ok = true;
    let mut nat_wit = String::new();
    let mut inputs_ok = true;
    let mut inputs_wit = String::new();
    for (k, f) in morphisms.iter().enumerate() {
        assert_eq!(f.source.carrier, a.carrier, "naturality needs endomorphisms");
        assert_eq!(f.target.carrier, a.carrier, "naturality needs endomorphisms");
        let inner = check_morphism(f, bound.min(3));
        if !inner.all_passed() && inputs_ok {
            inputs_ok = false;
            inputs_wit = format!("morphism #{k} fails its own check");
        }
        let tf = tangent_morphism(f);
        let ttf = tangent_morphism(&tf);
        let t2f = tangent_power_morphism(f, 2);
        let eqs: Vec<(&str, LinearMap, LinearMap)> = vec![
            (
                "p",
                f.map.compose(&tm.p.map),
                tm.p.map.compose(&tf.map),
            ),
            ("z", tf.map.compose(&tm.z.map), tm.z.map.compose(&f.map)),
            ("s", tf.map.compose(&tm.s.map), tm.s.map.compose(&t2f.map)),
            (
                "q1",
                tf.map.compose(&tm.q[0].map),
                tm.q[0].map.compose(&t2f.map),
            ),
            (
                "q2",
                tf.map.compose(&tm.q[1].map),
                tm.q[1].map.compose(&t2f.map),
            ),
            ("l", ttf.map.compose(&tm.l.map), tm.l.map.compose(&tf.map)),
            ("c", ttf.map.compose(&tm.c.map), tm.c.map.compose(&ttf.map)),
            ("n", tf.map.compose(&tm.n.map), tm.n.map.compose(&tf.map)),
        ];
        for (name, lhs, rhs) in eqs {
            if lhs != rhs && nat_ok {
                nat_ok = false;
                nat_wit = format!("naturality of {name} fails against morphism #{k}");
            }
        }
    }
    r.check(
        "tangent.natural-inputs",
        "supplied maps are algebra morphisms",
        inputs_ok,
        || inputs_wit,
    );
    r.check(
        "tangent.naturality",
        "naturality of the tangent structure maps",
        nat_ok,
        || nat_wit,
    );

    r.absorb("", check_tangent_lift(a, bound.min(3)));
    r
}

// ---------------------------------------------------------------------------
// Derivations and vector fields.
// ---------------------------------------------------------------------------

fn endo_symbol(from: &str, to: &str) -> String {
    format!("{from}>{to}")
}

/// The module of carrier endomorphisms, flattened to symbols `from>to`.
pub fn endo_module(carrier: &BasedModule) -> BasedModule {
    let mut syms = Vec::new();
    for from in carrier.basis() {
        for to in carrier.basis() {
            syms.push(endo_symbol(from, to));
        }
    }
    BasedModule::new(syms, carrier.tag())
}

/// Flattens an endomorphism into the `from>to` coordinate vector (used for
/// span membership tests on derivation spaces).
pub fn flatten_endo(carrier: &BasedModule, m: &LinearMap) -> Vector {
    let mut v = Vector::zero();
    for from in carrier.basis() {
        for (to, c) in m.column(from).iter() {
            v.add_term(&endo_symbol(from, to), c);
        }
    }
    v
}

fn endo_from_flat(carrier: &BasedModule, v: &Vector) -> LinearMap {
    LinearMap::from_fn(carrier.clone(), carrier.clone(), |from| {
        let mut col = Vector::zero();
        for (sym, c) in v.iter() {
            let (f, t) = sym.split_once('>').expect("endo symbol");
            if f == from {
                col.add_term(t, c);
            }
        }
        col
    })
}

/// A basis of the space of derivations of `A`: the kernel of the Leibniz
/// linear system instantiated on the generating tables.  Correctness for
/// derived operations follows from operad composition and is additionally
/// spot-checked by [`is_derivation`] at arity 3 in the test suites.
pub fn derivation_space(a: &PAlgebra) -> Vec<LinearMap> {
    let carrier = &a.carrier;
    let unknowns = endo_module(carrier);
    let keys: Vec<(usize, String, Vec<String>)> = a.tables.keys().cloned().collect();
    let mut eq_syms = Vec::new();
    for (k, _) in keys.iter().enumerate() {
        for c in carrier.basis() {
            eq_syms.push(tagged(k, c));
        }
    }
    let eqs = BasedModule::new(eq_syms, carrier.tag());
    let sys = LinearMap::from_fn(unknowns, eqs, |u| {
        let (from, to) = u.split_once('>').expect("endo symbol");
        let mut col = Vector::zero();
        for (k, (arity, sym, tuple)) in keys.iter().enumerate() {
            // D(μ(tuple)) term: the coefficient of `from` in the value feeds
            // the unknown D[from→to].
            let val = a.table_lookup(*arity, sym, tuple);
            if let Some(ca) = val.coeff(from) {
                col.add_term(&tagged(k, to), ca);
            }
            // −Σᵢ μ(…, D(tupleᵢ), …): slot i contributes when its input is
            // `from`, replaced by `to`.
            for i in 0..*arity {
                if tuple[i] == from {
                    let mut t2 = tuple.clone();
                    t2[i] = to.to_string();
                    for (cs, cc) in a.table_lookup(*arity, sym, &t2).iter() {
                        col.add_term(&tagged(k, cs), &-cc);
                    }
                }
            }
        }
        col
    });
    solve_kernel(&sys)
        .into_iter()
        .map(|v| endo_from_flat(carrier, &v))
        .collect()
}

/// Checks the Leibniz rule for `d` on all basis operations and tuples up to
/// `bound`; returns a counterexample description, or `None` for a derivation.
pub fn is_derivation(a: &PAlgebra, d: &LinearMap, bound: usize) -> Option<String> {
    let op = &a.operad;
    let bound = bound.min(op.max_arity);
    for n in 0..=bound {
        let pn = op.component(n);
        for mu_sym in pn.basis() {
            let mu = OperadElement::basis(n, mu_sym, op.tag);
            for word in tuples(&a.carrier, n) {
                let gens: Vec<Vector> = word.iter().map(|s| a.carrier.gen(s)).collect();
                let lhs = d.apply(&a.evaluate(&mu, &gens));
                let mut rhs = Vector::zero();
                for i in 0..n {
                    let mut args = gens.clone();
                    args[i] = d.apply(&gens[i]);
                    rhs = rhs.add(&a.evaluate(&mu, &args));
                }
                if lhs != rhs {
                    return Some(format!(
                        "D({mu_sym}; {}) = {lhs} ≠ {rhs}",
                        word.join(",")
                    ));
                }
            }
        }
    }
    None
}

/// The commutator `D₁∘D₂ − D₂∘D₁` (always a derivation when the inputs are).
pub fn derivation_bracket(d1: &LinearMap, d2: &LinearMap) -> LinearMap {
    d1.compose(d2).add(&d2.compose(d1).neg())
}

/// The vector field `v_D = ⟨1, D⟩ : A → T(A)`.
pub fn vector_field_from_derivation(a: &PAlgebra, d: &LinearMap) -> AlgebraMorphism {
    let t = a.tangent_bundle();
    let one = Scalar::one(a.operad.tag);
    let map = LinearMap::from_fn(a.carrier.clone(), t.carrier.clone(), |s| {
        let mut v = Vector::term(&tagged(0, s), one.clone());
        for (sym, c) in d.column(s).iter() {
            v.add_term(&tagged(1, sym), c);
        }
        v
    });
    AlgebraMorphism {
        source: a.clone(),
        target: t,
        map,
    }
}

/// The derivation `D_v = π₂ ∘ v` underlying a vector field.
pub fn derivation_from_vector_field(v: &AlgebraMorphism) -> LinearMap {
    LinearMap::from_fn(
        v.source.carrier.clone(),
        v.source.carrier.clone(),
        |s| {
            let mut out = Vector::zero();
            for (sym, c) in v.map.column(s).iter() {
                let (i, rest) = split_tag(sym).expect("tangent symbol");
                if i == 1 {
                    out.add_term(rest, c);
                }
            }
            out
        },
    )
}

/// Checks the vector-field conditions for `v : A → T(A)`: section of the
/// projection, and algebra morphism.  Returns a counterexample, or `None`.
pub fn is_vector_field(v: &AlgebraMorphism, bound: usize) -> Option<String> {
    let a = &v.source;
    let tm_p = LinearMap::from_fn(v.target.carrier.clone(), a.carrier.clone(), |s| {
        let (i, rest) = split_tag(s).expect("tangent symbol");
        if i == 0 {
            a.carrier.gen(rest)
        } else {
            Vector::zero()
        }
    });
    if tm_p.compose(&v.map) != LinearMap::identity(&a.carrier) {
        return Some("p ∘ v ≠ id".to_string());
    }
    let inner = check_morphism(v, bound);
    let wit = inner
        .failures()
        .next()
        .map(|c| c.counterexample.clone().unwrap_or_default());
    wit
}

// ---------------------------------------------------------------------------
// Differential objects in ALG_P.
// ---------------------------------------------------------------------------

/// Evaluates both differential-object criteria up to `bound` and reports
/// them plus their (required) agreement:
///
/// * vanishing — `μ(a₁,…,aₙ) = 0` for every basis operation of arity `n ≠ 1`;
/// * retract — evaluation factors through the differential combinator,
///   `α = α ∘ S(π₂) ∘ ∂_A`.
pub fn check_differential_object_alg(a: &PAlgebra, bound: usize) -> Report {
    let op = &a.operad;
    let mut r = Report::new("diff-object", &op.id, &a.id)
        .with_bounds(&format!("arity<={bound}"));
    let bound = bound.min(op.max_arity);
    let mut van_ok = true;
    let mut van_wit = String::new();
    for n in 0..=bound {
        if n == 1 {
            continue;
        }
        let pn = op.component(n);
        for mu_sym in pn.basis() {
            let mu = OperadElement::basis(n, mu_sym, op.tag);
            for word in tuples(&a.carrier, n) {
                let gens: Vec<Vector> = word.iter().map(|s| a.carrier.gen(s)).collect();
                let v = a.evaluate(&mu, &gens);
                if !v.is_zero() && van_ok {
                    van_ok = false;
                    van_wit = format!("({mu_sym}; {}) = {v}", word.join(","));
                }
            }
        }
    }
    let mut ret_ok = true;
    let mut ret_wit = String::new();
    'retract: for n in 0..=bound {
        let pn = op.component(n);
        for mu_sym in pn.basis() {
            let mu = OperadElement::basis(n, mu_sym, op.tag);
            for word in tuples(&a.carrier, n) {
                let el = canonicalize(op, &mu, &word);
                let lhs = a.eval_free(&el);
                // S(π₂) ∘ ∂: keep only the d-slot letter of each summand.
                let differentiated = diff_transform(op, &el);
                let projected = crate::free::apply_letters(op, &differentiated, |s| {
                    let (i, rest) = split_tag(s).expect("tagged letter");
                    if i == 1 {
                        Vector::term(rest, Scalar::one(op.tag))
                    } else {
                        Vector::zero()
                    }
                });
                let rhs = a.eval_free(&projected);
                if lhs != rhs {
                    ret_ok = false;
                    ret_wit = format!("({mu_sym}; {}): {lhs} ≠ {rhs}", word.join(","));
                    break 'retract;
                }
            }
        }
    }
    r.check(
        "diffobj.vanishing",
        "operations of arity other than one vanish",
        van_ok,
        || van_wit.clone(),
    );
    r.check(
        "diffobj.retract",
        "evaluation factors through the differential combinator",
        ret_ok,
        || ret_wit,
    );
    r.check(
        "diffobj.agreement",
        "the two differential-object criteria agree",
        van_ok == ret_ok,
        || format!("vanishing: {van_ok}, retract: {ret_ok}"),
    );
    r
}

/// The differential-object verdict (by the vanishing criterion).
pub fn is_differential_object(a: &PAlgebra, bound: usize) -> bool {
    let r = check_differential_object_alg(a, bound);
    r.checks
        .iter()
        .find(|c| c.name == "diffobj.vanishing")
        .map(|c| c.status == crate::report::Status::Pass)
        .unwrap_or(false)
}

// ---------------------------------------------------------------------------
// The standard test algebras and their endomorphism families.
// ---------------------------------------------------------------------------

/// `ℚ[x]/(xᵏ)` as a `Com`-algebra; basis `1, x, x2, …`.  `k = 2` is the dual
/// numbers.
pub fn poly_mod_algebra(k: usize) -> PAlgebra {
    assert!(k >= 1);
    let tag = FieldTag::Q;
    let names: Vec<String> = (0..k)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "x".to_string(),
            i => format!("x{i}"),
        })
        .collect();
    let module = BasedModule::new(names.clone(), tag);
    let mut mult = BTreeMap::new();
    for (i, a) in names.iter().enumerate() {
        for (j, b) in names.iter().enumerate() {
            let v = if i + j < k {
                module.gen(&names[i + j])
            } else {
                Vector::zero()
            };
            mult.insert((a.clone(), b.clone()), v);
        }
    }
    let alg = AssocAlgebra {
        unit: module.gen("1"),
        module,
        mult,
    };
    PAlgebra::com_from_assoc(&format!("qx{k}"), Arc::new(make_com(tag)), &alg)
}

/// The `2×2` upper-triangular matrices as an `Ass`-algebra; basis
/// `e11, e12, e22`.
pub fn upper_triangular_algebra() -> PAlgebra {
    let tag = FieldTag::Q;
    let module = BasedModule::from_names(&["e11", "e12", "e22"], tag);
    let one = Scalar::one(tag);
    let mut mult = BTreeMap::new();
    for a in module.basis() {
        for b in module.basis() {
            mult.insert((a.clone(), b.clone()), Vector::zero());
        }
    }
    mult.insert(("e11".into(), "e11".into()), Vector::term("e11", one.clone()));
    mult.insert(("e11".into(), "e12".into()), Vector::term("e12", one.clone()));
    mult.insert(("e12".into(), "e22".into()), Vector::term("e12", one.clone()));
    mult.insert(("e22".into(), "e22".into()), Vector::term("e22", one.clone()));
    let alg = AssocAlgebra {
        unit: Vector::from_terms(&[("e11", one.clone()), ("e22", one)]),
        module,
        mult,
    };
    PAlgebra::ass_from_assoc("ut2", Arc::new(make_ass(tag)), &alg)
}

/// The two-dimensional non-abelian Lie algebra with `[h, e] = 2e`.
pub fn lie_he_algebra() -> PAlgebra {
    let tag = FieldTag::Q;
    let module = BasedModule::from_names(&["h", "e"], tag);
    let mut bracket = BTreeMap::new();
    bracket.insert(
        ("h".to_string(), "e".to_string()),
        Vector::term("e", Scalar::from_int(2, tag)),
    );
    PAlgebra::lie_from_bracket("lie-he", Arc::new(make_lie(tag)), module, &bracket)
}

/// The abelian Lie algebra of dimension `n` (trivial bracket).
pub fn abelian_lie_algebra(n: usize) -> PAlgebra {
    let tag = FieldTag::Q;
    let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let module = BasedModule::new(names, tag);
    PAlgebra::lie_from_bracket(
        &format!("abelian-lie{n}"),
        Arc::new(make_lie(tag)),
        module,
        &BTreeMap::new(),
    )
}

/// The regular module over the dual numbers, as an algebra for `A•` with
/// `A = ℚ[t]/(t²)`: carrier `u, v` with `t·u = v`, `t·v = 0`.
pub fn pointed_dual_module() -> PAlgebra {
    let tag = FieldTag::Q;
    let alg = AssocAlgebra::dual_numbers(tag);
    let operad = Arc::new(make_pointed_operad(alg));
    let module = BasedModule::from_names(&["u", "v"], tag);
    let one = Scalar::one(tag);
    let mut action = BTreeMap::new();
    action.insert(("1".to_string(), "u".to_string()), Vector::term("u", one.clone()));
    action.insert(("1".to_string(), "v".to_string()), Vector::term("v", one.clone()));
    action.insert(("t".to_string(), "u".to_string()), Vector::term("v", one));
    action.insert(("t".to_string(), "v".to_string()), Vector::zero());
    PAlgebra::pointed_module("dual-module", operad, module, &action)
}

/// The zero algebra over `Com` (empty carrier).
pub fn zero_com_algebra() -> PAlgebra {
    let tag = FieldTag::Q;
    PAlgebra::from_tables(
        "zero",
        Arc::new(make_com(tag)),
        BasedModule::new(Vec::new(), tag),
        BTreeMap::new(),
    )
}

/// A hand-constructed family of verified endomorphisms for each standard
/// test algebra, used by the naturality checks.  Every returned map passes
/// [`check_morphism`]; the construction panics otherwise.
pub fn standard_endomorphisms(a: &PAlgebra) -> Vec<AlgebraMorphism> {
    let tag = a.operad.tag;
    let s = |n: i64| Scalar::from_int(n, tag);
    let mut maps: Vec<LinearMap> = vec![LinearMap::identity(&a.carrier)];
    let from_cols = |cols: Vec<(&str, Vector)>| {
        let mut m = BTreeMap::new();
        for (k, v) in cols {
            if !v.is_zero() {
                m.insert(k.to_string(), v);
            }
        }
        LinearMap::new(a.carrier.clone(), a.carrier.clone(), m)
    };
    match a.id.as_str() {
        // f(1) = 1, f(x) = λx.
        "qx2" => {
            for lam in [2, 3, -1, -2, 4, 5, -3, 0, 7] {
                maps.push(from_cols(vec![
                    ("1", Vector::term("1", s(1))),
                    ("x", Vector::term("x", s(lam))),
                ]));
            }
        }
        // f(x) = λx + μx², f(x²) = λ²x².
        "qx3" => {
            for (lam, mu) in [
                (2, 0),
                (1, 1),
                (2, 1),
                (3, 0),
                (-1, 0),
                (-1, 2),
                (2, -1),
                (3, 1),
                (0, 1),
            ] {
                maps.push(from_cols(vec![
                    ("1", Vector::term("1", s(1))),
                    (
                        "x",
                        Vector::from_terms(&[("x", s(lam)), ("x2", s(mu))]),
                    ),
                    ("x2", Vector::term("x2", s(lam * lam))),
                ]));
            }
        }
        // Conjugation by e11 + λe12 + e22.
        "ut2" => {
            for lam in [1, 2, 3, -1, -2, 4, 5, -3, 7] {
                maps.push(from_cols(vec![
                    (
                        "e11",
                        Vector::from_terms(&[("e11", s(1)), ("e12", s(-lam))]),
                    ),
                    ("e12", Vector::term("e12", s(1))),
                    (
                        "e22",
                        Vector::from_terms(&[("e12", s(lam)), ("e22", s(1))]),
                    ),
                ]));
            }
        }
        // f(h) = h + αe, f(e) = βe.
        "lie-he" => {
            for (al, be) in [
                (0, 2),
                (1, 1),
                (2, 1),
                (0, -1),
                (1, 2),
                (0, 0),
                (3, 1),
                (-1, 1),
                (2, 3),
            ] {
                maps.push(from_cols(vec![
                    (
                        "h",
                        Vector::from_terms(&[("h", s(1)), ("e", s(al))]),
                    ),
                    ("e", Vector::term("e", s(be))),
                ]));
            }
        }
        // A-linear maps of the regular module: f(u) = αu + βv, f(v) = αv.
        "dual-module" => {
            for (al, be) in [
                (1, 1),
                (2, 0),
                (2, 1),
                (0, 1),
                (-1, 0),
                (-1, 2),
                (3, -1),
                (0, 0),
                (2, -2),
            ] {
                maps.push(from_cols(vec![
                    (
                        "u",
                        Vector::from_terms(&[("u", s(al)), ("v", s(be))]),
                    ),
                    ("v", Vector::term("v", s(al))),
                ]));
            }
        }
        // Trivial bracket: every linear map is a morphism.
        id if id.starts_with("abelian-lie") => {
            let b = a.carrier.basis().to_vec();
            for k in 1..=9i64 {
                let m = LinearMap::from_fn(a.carrier.clone(), a.carrier.clone(), |from| {
                    let i = b.iter().position(|x| x == from).unwrap() as i64;
                    let mut v = Vector::zero();
                    for (j, sym) in b.iter().enumerate() {
                        v.add_term(sym, &s((k * (i + 1) + j as i64) % 5 - 2));
                    }
                    v
                });
                maps.push(m);
            }
        }
        _ => {}
    }
    maps.into_iter()
        .map(|map| {
            let f = AlgebraMorphism {
                source: a.clone(),
                target: a.clone(),
                map,
            };
            let check = check_morphism(&f, 3);
            assert!(
                check.all_passed(),
                "hand endomorphism family broken for {}: {:?}",
                a.id,
                check.failures().next().map(|c| c.counterexample.clone())
            );
            f
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{echelon_basis, reduce_mod};

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n, FieldTag::Q)
    }

    #[test]
    fn dual_numbers_evaluation() {
        let a = poly_mod_algebra(2);
        let x = a.carrier.gen("x");
        let one = a.carrier.gen("1");
        let c2 = OperadElement::basis(2, "c2", FieldTag::Q);
        // x·x = 0, 1·x = x, and the derived triple product vanishes too.
        assert!(a.evaluate(&c2, &[x.clone(), x.clone()]).is_zero());
        assert_eq!(a.evaluate(&c2, &[one.clone(), x.clone()]), x);
        let c3 = OperadElement::basis(3, "c3", FieldTag::Q);
        assert!(a
            .evaluate(&c3, &[x.clone(), one.clone(), x.clone()])
            .is_zero());
        assert_eq!(a.evaluate(&a.operad.unit(), std::slice::from_ref(&x)), x);
    }

    #[test]
    fn lie_he_bracket_values() {
        let a = lie_he_algebra();
        let h = a.carrier.gen("h");
        let e = a.carrier.gen("e");
        let br = OperadElement::basis(2, "l1.2", FieldTag::Q);
        assert_eq!(a.evaluate(&br, &[h.clone(), e.clone()]), e.scale(&s(2)));
        assert_eq!(a.evaluate(&br, &[e.clone(), h.clone()]), e.scale(&s(-2)));
        assert!(a.evaluate(&br, &[e.clone(), e.clone()]).is_zero());
        assert!(a.evaluate(&br, &[h.clone(), h.clone()]).is_zero());
    }

    #[test]
    fn axioms_pass_for_test_algebras() {
        for a in [
            poly_mod_algebra(2),
            poly_mod_algebra(3),
            upper_triangular_algebra(),
            lie_he_algebra(),
            abelian_lie_algebra(2),
            pointed_dual_module(),
            zero_com_algebra(),
        ] {
            let r = check_algebra_axioms(&a, 3);
            assert!(r.all_passed(), "{} fails: {}", a.id, r.render_text());
        }
    }

    #[test]
    fn broken_table_fails_axioms() {
        // Mutate the dual numbers so the sorted-word entry 1·x = 2x: the
        // derived triple products disagree across composition slots and the
        // checker must report a counterexample.
        let mut a = poly_mod_algebra(2);
        a.tables.insert(
            (2, "c2".to_string(), vec!["1".to_string(), "x".to_string()]),
            Vector::term("x", s(2)),
        );
        let r = check_algebra_axioms(&a, 3);
        assert!(!r.all_passed());
        assert!(r.failures().all(|c| c.counterexample.is_some()));
    }

    #[test]
    fn tangent_bundle_semidirect_product() {
        // (x + ε·1)² in T(ℚ[x]/(x²)) = (x², 2x) = (0, 2x).
        let a = poly_mod_algebra(2);
        let t = a.tangent_bundle();
        let v = t.carrier.gen("0#x").add(&t.carrier.gen("1#1"));
        let c2 = OperadElement::basis(2, "c2", FieldTag::Q);
        let got = t.evaluate(&c2, &[v.clone(), v.clone()]);
        assert_eq!(got, Vector::term("1#x", s(2)));
        assert!(check_algebra_axioms(&t, 3).all_passed());
    }

    #[test]
    fn tangent_lift_matches_dist_law() {
        for a in [
            poly_mod_algebra(2),
            lie_he_algebra(),
            pointed_dual_module(),
            upper_triangular_algebra(),
        ] {
            let r = check_tangent_lift(&a, 3);
            assert!(r.all_passed(), "{} lift fails: {}", a.id, r.render_text());
        }
    }

    #[test]
    fn tangent_equations_pass() {
        for a in [poly_mod_algebra(2), lie_he_algebra()] {
            let fam = standard_endomorphisms(&a);
            let r = check_tangent_equations(&a, &fam, 3);
            assert!(r.all_passed(), "{} fails: {}", a.id, r.render_text());
        }
    }

    #[test]
    fn tangent_mutations_are_caught() {
        let a = poly_mod_algebra(2);
        let fam = standard_endomorphisms(&a);
        let base = tangent_maps(&a);
        // Mutate s to drop the second fiber summand.
        let mut tm = base.clone();
        let one = Scalar::one(FieldTag::Q);
        tm.s.map = LinearMap::from_fn(
            tm.s.map.domain.clone(),
            tm.s.map.codomain.clone(),
            |sym| {
                let (i, rest) = split_tag(sym).unwrap();
                match i {
                    0 => Vector::term(&tagged(0, rest), one.clone()),
                    1 => Vector::term(&tagged(1, rest), one.clone()),
                    _ => Vector::zero(),
                }
            },
        );
        let r = check_tangent_equations_with(&a, &tm, &fam, 3);
        assert!(!r.all_passed());
        assert!(r.failures().all(|c| c.counterexample.is_some()));
        // Mutate c to the identity.
        let mut tm = base.clone();
        tm.c.map = LinearMap::identity(&tm.c.map.domain);
        let r = check_tangent_equations_with(&a, &tm, &fam, 3);
        assert!(!r.all_passed());
    }

    #[test]
    fn derivation_spaces_match_hand_oracles() {
        // dim Der(ℚ[x]/(x²)) = 1 spanned by D(x) = x; the solver's basis is
        // echelonized so the single generator is exactly that map.
        let a2 = poly_mod_algebra(2);
        let ders = derivation_space(&a2);
        assert_eq!(ders.len(), 1);
        assert!(ders[0].column("1").is_zero());
        assert_eq!(ders[0].column("x"), Vector::term("x", s(1)));
        // dim Der(ℚ[x]/(x³)) = 2 with D(x) ∈ span{x, x²}.
        let a3 = poly_mod_algebra(3);
        let ders3 = derivation_space(&a3);
        assert_eq!(ders3.len(), 2);
        for d in ders.iter().chain(ders3.iter()) {
            assert!(is_derivation(
                if d.domain.dim() == 2 { &a2 } else { &a3 },
                d,
                3
            )
            .is_none());
        }
    }

    #[test]
    fn derivation_bracket_closure_and_jacobi() {
        let a = poly_mod_algebra(3);
        let ders = derivation_space(&a);
        let endo = endo_module(&a.carrier);
        let span: Vec<Vector> = ders.iter().map(|d| flatten_endo(&a.carrier, d)).collect();
        let ech = echelon_basis(&endo, &span);
        for d1 in &ders {
            for d2 in &ders {
                let br = derivation_bracket(d1, d2);
                assert!(is_derivation(&a, &br, 3).is_none());
                let flat = flatten_endo(&a.carrier, &br);
                assert!(reduce_mod(&endo, &ech, &flat).is_zero(), "bracket escapes span");
            }
        }
        // Jacobi on the computed basis.
        let dd = &ders;
        for x in dd {
            for y in dd {
                for z in dd {
                    let j = derivation_bracket(&derivation_bracket(x, y), z)
                        .add(&derivation_bracket(&derivation_bracket(y, z), x))
                        .add(&derivation_bracket(&derivation_bracket(z, x), y));
                    assert_eq!(j, LinearMap::zero(&a.carrier, &a.carrier));
                }
            }
        }
    }

    #[test]
    fn vector_field_round_trips() {
        let a = poly_mod_algebra(2);
        for d in derivation_space(&a) {
            let v = vector_field_from_derivation(&a, &d);
            assert!(is_vector_field(&v, 3).is_none());
            assert_eq!(derivation_from_vector_field(&v), d);
        }
        // A non-Leibniz endomorphism (D(1) = 1) is rejected.
        let bad = LinearMap::from_fn(a.carrier.clone(), a.carrier.clone(), |sym| {
            Vector::term(sym, s(1))
        });
        assert!(is_derivation(&a, &bad, 3).is_some());
        let v = vector_field_from_derivation(&a, &bad);
        assert!(is_vector_field(&v, 3).is_some());
    }

    #[test]
    fn differential_object_criteria() {
        // Abelian Lie algebra: yes.  Nonabelian: no.  Unital Com: no.
        // Zero algebra and A•-modules: yes.  Both routes agree everywhere.
        for (a, expect) in [
            (abelian_lie_algebra(2), true),
            (lie_he_algebra(), false),
            (poly_mod_algebra(2), false),
            (zero_com_algebra(), true),
            (pointed_dual_module(), true),
        ] {
            let r = check_differential_object_alg(&a, 3);
            let agree = r
                .checks
                .iter()
                .find(|c| c.name == "diffobj.agreement")
                .unwrap();
            assert_eq!(agree.status, crate::report::Status::Pass, "{}", a.id);
            assert_eq!(is_differential_object(&a, 3), expect, "{}", a.id);
        }
    }

    #[test]
    fn morphism_families_are_verified() {
        for a in [
            poly_mod_algebra(2),
            poly_mod_algebra(3),
            upper_triangular_algebra(),
            lie_he_algebra(),
            pointed_dual_module(),
            abelian_lie_algebra(2),
        ] {
            let fam = standard_endomorphisms(&a);
            assert!(fam.len() >= 10, "{} family too small: {}", a.id, fam.len());
        }
    }
}
