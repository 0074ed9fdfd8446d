//! Based free modules, sparse vectors, linear maps, and the two exact
//! solvers everything else relies on: kernel bases and quotient bases.
//!
//! All elimination is deterministic — pivots are chosen in basis order — so
//! every derived basis is reproducible bit-exactly.  Vectors are sparse maps
//! from basis symbols to scalars and never store zero coefficients, which
//! makes equality a structural comparison.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{FieldTag, Scalar};

/// A free module with a chosen ordered basis of named symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasedModule {
    basis: Vec<String>,
    tag: FieldTag,
}

impl BasedModule {
    /// Builds a module from an ordered list of distinct symbol names.
    pub fn new(basis: Vec<String>, tag: FieldTag) -> Self {
        let mut seen = std::collections::HashSet::new();
        for b in &basis {
            assert!(seen.insert(b.clone()), "duplicate basis symbol {b:?}");
        }
        BasedModule { basis, tag }
    }

    pub fn from_names(names: &[&str], tag: FieldTag) -> Self {
        Self::new(names.iter().map(|s| s.to_string()).collect(), tag)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn contains(&self, sym: &str) -> bool {
        self.basis.iter().any(|b| b == sym)
    }

    pub fn index_of(&self, sym: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == sym)
    }

    /// The basis vector for `sym`.
    pub fn gen(&self, sym: &str) -> Vector {
        assert!(self.contains(sym), "unknown basis symbol {sym:?}");
        Vector::term(sym, Scalar::one(self.tag))
    }
}

/// A sparse vector: finitely many symbol → scalar entries, no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct Vector {
    coeffs: BTreeMap<String, Scalar>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    /// `c · sym` (the zero vector when `c = 0`).
    pub fn term(sym: &str, c: Scalar) -> Self {
        let mut v = Vector::zero();
        v.add_term(sym, &c);
        v
    }

    pub fn from_terms(terms: &[(&str, Scalar)]) -> Self {
        let mut v = Vector::zero();
        for (s, c) in terms {
            v.add_term(s, c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, sym: &str) -> Option<&Scalar> {
        self.coeffs.get(sym)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Adds `c · sym` in place, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, sym: &str, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(sym) {
            Some(existing) => {
                let sum = &*existing + c;
                if sum.is_zero() {
                    self.coeffs.remove(sym);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.coeffs.insert(sym.to_string(), c.clone());
            }
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        for (s, c) in other.iter() {
            out.add_term(s, c);
        }
        out
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Vector {
        Vector {
            coeffs: self.coeffs.iter().map(|(s, c)| (s.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Vector {
        if c.is_zero() {
            return Vector::zero();
        }
        Vector {
            coeffs: self.coeffs.iter().map(|(s, k)| (s.clone(), k * c)).collect(),
        }
    }

    /// Renames every symbol through `f` (symbols may merge; coefficients add).
    pub fn map_symbols(&self, f: impl Fn(&str) -> String) -> Vector {
        let mut out = Vector::zero();
        for (s, c) in self.iter() {
            out.add_term(&f(s), c);
        }
        out
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{s}")?;
            } else {
                write!(f, "{c}*{s}")?;
            }
        }
        Ok(())
    }
}

/// A linear map given by its image column per domain basis symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    pub domain: BasedModule,
    pub codomain: BasedModule,
    columns: BTreeMap<String, Vector>,
}

impl LinearMap {
    /// Builds a map from explicit columns; missing columns are zero.
    pub fn new(
        domain: BasedModule,
        codomain: BasedModule,
        columns: BTreeMap<String, Vector>,
    ) -> Self {
        for (sym, col) in &columns {
            assert!(domain.contains(sym), "column for non-basis symbol {sym:?}");
            for (s, _) in col.iter() {
                assert!(
                    codomain.contains(s),
                    "column entry {s:?} outside the codomain"
                );
            }
        }
        LinearMap {
            domain,
            codomain,
            columns,
        }
    }

    /// Builds a map from a symbol-level function.
    pub fn from_fn(
        domain: BasedModule,
        codomain: BasedModule,
        f: impl Fn(&str) -> Vector,
    ) -> Self {
        let columns = domain
            .basis()
            .iter()
            .map(|s| (s.clone(), f(s)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Self::new(domain, codomain, columns)
    }

    pub fn identity(module: &BasedModule) -> Self {
        Self::from_fn(module.clone(), module.clone(), |s| module.gen(s))
    }

    pub fn zero(domain: &BasedModule, codomain: &BasedModule) -> Self {
        LinearMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            columns: BTreeMap::new(),
        }
    }

    pub fn column(&self, sym: &str) -> Vector {
        self.columns.get(sym).cloned().unwrap_or_default()
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (s, c) in v.iter() {
            assert!(self.domain.contains(s), "vector outside the domain: {s:?}");
            out = out.add(&self.column(s).scale(c));
        }
        out
    }

    /// `self ∘ other` (other first).
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(
            other.codomain, self.domain,
            "composition with mismatched modules"
        );
        LinearMap::from_fn(other.domain.clone(), self.codomain.clone(), |s| {
            self.apply(&other.column(s))
        })
    }

    pub fn add(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(self.domain, other.domain);
        assert_eq!(self.codomain, other.codomain);
        LinearMap::from_fn(self.domain.clone(), self.codomain.clone(), |s| {
            self.column(s).add(&other.column(s))
        })
    }

    pub fn neg(&self) -> LinearMap {
        LinearMap::from_fn(self.domain.clone(), self.codomain.clone(), |s| {
            self.column(s).neg()
        })
    }
}

/// Deterministic reduced echelon span of `vectors` inside `module`: pivots in
/// basis order, pivot coefficient one, pivot column cleared elsewhere.
/// Returns the echelon basis sorted by pivot position.
pub fn echelon_basis(module: &BasedModule, vectors: &[Vector]) -> Vec<Vector> {
    // pivot index -> reduced row with that pivot
    let mut rows: BTreeMap<usize, Vector> = BTreeMap::new();
    for v in vectors {
        let mut v = v.clone();
        // Reduce against all existing pivots.
        for (pidx, row) in rows.iter() {
            let psym = &module.basis()[*pidx];
            if let Some(c) = v.coeff(psym).cloned() {
                v = v.sub(&row.scale(&c));
            }
        }
        // Find the leading entry (smallest basis index).
        let lead = v
            .iter()
            .filter_map(|(s, _)| module.index_of(s))
            .min();
        if let Some(idx) = lead {
            let lsym = &module.basis()[idx];
            let c = v.coeff(lsym).unwrap().clone();
            let normalized = v.scale(&c.inv().expect("nonzero leading coefficient"));
            // Back-substitute the new pivot into existing rows.
            let keys: Vec<usize> = rows.keys().cloned().collect();
            for k in keys {
                let row = rows.get(&k).unwrap().clone();
                if let Some(c) = row.coeff(lsym).cloned() {
                    rows.insert(k, row.sub(&normalized.scale(&c)));
                }
            }
            rows.insert(idx, normalized);
        }
    }
    rows.into_values().collect()
}

/// A basis of the kernel `{v : m(v) = 0}`, echelonized deterministically.
pub fn solve_kernel(m: &LinearMap) -> Vec<Vector> {
    let dom = &m.domain;
    let cod = &m.codomain;
    let tag = dom.tag();
    let n = dom.dim();
    // Dense matrix of the map: rows = codomain, columns = domain.
    let mut mat: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(tag); n]; cod.dim()];
    for (j, s) in dom.basis().iter().enumerate() {
        for (sym, c) in m.column(s).iter() {
            mat[cod.index_of(sym).unwrap()][j] = c.clone();
        }
    }
    // Row reduction with column pivots chosen left to right.
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0usize;
    for col in 0..n {
        if row >= mat.len() {
            break;
        }
        let Some(pr) = (row..mat.len()).find(|r| !mat[*r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, pr);
        let inv = mat[row][col].inv().unwrap();
        for cell in mat[row].iter_mut() {
            *cell = &*cell * &inv;
        }
        let pivot_row = mat[row].clone();
        for (r, other) in mat.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let factor = other[col].clone();
                for (cell, p) in other.iter_mut().zip(&pivot_row) {
                    *cell = &*cell - &(&factor * p);
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
    }
    // One kernel vector per free column.
    let mut kernel = Vec::new();
    for (col, pv) in pivot_of_col.iter().enumerate() {
        if pv.is_some() {
            continue;
        }
        let mut v = Vector::term(&dom.basis()[col], Scalar::one(tag));
        for (c2, pv2) in pivot_of_col.iter().enumerate() {
            if let Some(r) = pv2 {
                v.add_term(&dom.basis()[c2], &-&mat[*r][col]);
            }
        }
        kernel.push(v);
    }
    echelon_basis(dom, &kernel)
}

/// A particular solution of `m(x) = target`, if one exists.  Deterministic:
/// elimination pivots are chosen in basis order and free variables are zero.
pub fn solve(m: &LinearMap, target: &Vector) -> Option<Vector> {
    let dom = &m.domain;
    let cod = &m.codomain;
    let tag = dom.tag();
    let n = dom.dim();
    // Augmented dense matrix [M | target].
    let mut mat: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(tag); n + 1]; cod.dim()];
    for (j, s) in dom.basis().iter().enumerate() {
        for (sym, c) in m.column(s).iter() {
            mat[cod.index_of(sym).unwrap()][j] = c.clone();
        }
    }
    for (sym, c) in target.iter() {
        mat[cod.index_of(sym)?][n] = c.clone();
    }
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0usize;
    for col in 0..n {
        if row >= mat.len() {
            break;
        }
        let Some(pr) = (row..mat.len()).find(|r| !mat[*r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, pr);
        let inv = mat[row][col].inv().unwrap();
        for cell in mat[row].iter_mut() {
            *cell = &*cell * &inv;
        }
        let pivot_row = mat[row].clone();
        for (r, other) in mat.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let factor = other[col].clone();
                for (cell, p) in other.iter_mut().zip(&pivot_row) {
                    *cell = &*cell - &(&factor * p);
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
    }
    // Inconsistent if a zero row has a nonzero augmented entry.
    for r in mat.iter() {
        if r[..n].iter().all(|c| c.is_zero()) && !r[n].is_zero() {
            return None;
        }
    }
    let mut out = Vector::zero();
    for (col, pv) in pivot_of_col.iter().enumerate() {
        if let Some(r) = pv {
            out.add_term(&dom.basis()[col], &mat[*r][n]);
        }
    }
    Some(out)
}

/// The quotient of `ambient` by the span of `relations`.
#[derive(Debug, Clone)]
pub struct Quotient {
    /// The quotient as a based module; its symbols are the ambient basis
    /// symbols not hit by a relation pivot.
    pub module: BasedModule,
    /// Representative vectors in the ambient module, one per quotient symbol.
    pub reps: Vec<Vector>,
    /// The surjection `ambient → module` killing exactly `span(relations)`.
    pub projection: LinearMap,
}

/// Quotient-basis computation: echelonizes the relations and keeps the
/// non-pivot ambient symbols as representatives.
pub fn quotient_basis(ambient: &BasedModule, relations: &[Vector]) -> Quotient {
    let ech = echelon_basis(ambient, relations);
    let pivots: Vec<usize> = ech
        .iter()
        .map(|r| {
            r.iter()
                .filter_map(|(s, _)| ambient.index_of(s))
                .min()
                .unwrap()
        })
        .collect();
    let free_syms: Vec<String> = ambient
        .basis()
        .iter()
        .enumerate()
        .filter(|(i, _)| !pivots.contains(i))
        .map(|(_, s)| s.clone())
        .collect();
    let module = BasedModule::new(free_syms.clone(), ambient.tag());
    let reps = free_syms.iter().map(|s| ambient.gen(s)).collect();
    let projection = LinearMap::from_fn(ambient.clone(), module.clone(), |s| {
        let idx = ambient.index_of(s).unwrap();
        match pivots.iter().position(|p| *p == idx) {
            None => module.gen(s),
            Some(k) => {
                // Pivot symbol: rewrite via its echelon row, then project the
                // (strictly later, pivot-free) remainder.
                let row = &ech[k];
                let mut out = Vector::zero();
                for (sym, c) in row.iter() {
                    if sym != s {
                        out.add_term(sym, &-c);
                    }
                }
                out
            }
        }
    });
    Quotient {
        module,
        reps,
        projection,
    }
}

/// Reduces `v` modulo an echelonized relation set (normal form in the
/// ambient module rather than in a renamed quotient module).
pub fn reduce_mod(module: &BasedModule, ech: &[Vector], v: &Vector) -> Vector {
    let mut v = v.clone();
    for row in ech {
        let pidx = row
            .iter()
            .filter_map(|(s, _)| module.index_of(s))
            .min()
            .unwrap();
        let psym = &module.basis()[pidx];
        if let Some(c) = v.coeff(psym).cloned() {
            v = v.sub(&row.scale(&c));
        }
    }
    v
}

// ---------------------------------------------------------------------------
// Finite biproducts.  The product of modules tags every symbol with its
// component index (`"0#x"`, `"1#x"`, …); tags nest unambiguously because the
// split is always at the first `#`.  User-facing symbols never contain `#`.
// ---------------------------------------------------------------------------

/// Tags `sym` as living in component `i` of a product.
pub fn tagged(i: usize, sym: &str) -> String {
    format!("{i}#{sym}")
}

/// Splits a product symbol into its component index and inner symbol.
pub fn split_tag(sym: &str) -> Option<(usize, &str)> {
    let (i, rest) = sym.split_once('#')?;
    Some((i.parse().ok()?, rest))
}

/// The biproduct `V₁ × ⋯ × Vₙ`, component-major symbol order.
pub fn product_module(parts: &[&BasedModule]) -> BasedModule {
    assert!(!parts.is_empty());
    let tag = parts[0].tag();
    let mut basis = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        assert_eq!(p.tag(), tag, "product of modules over different fields");
        for s in p.basis() {
            basis.push(tagged(i, s));
        }
    }
    BasedModule::new(basis, tag)
}

/// Projection `πᵢ : V₁ × ⋯ × Vₙ → Vᵢ`.
pub fn projection(parts: &[&BasedModule], i: usize) -> LinearMap {
    let prod = product_module(parts);
    LinearMap::from_fn(prod, parts[i].clone(), |s| {
        let (j, inner) = split_tag(s).expect("product symbol");
        if j == i {
            parts[i].gen(inner)
        } else {
            Vector::zero()
        }
    })
}

/// Injection `ιᵢ : Vᵢ → V₁ × ⋯ × Vₙ`.
pub fn injection(parts: &[&BasedModule], i: usize) -> LinearMap {
    let prod = product_module(parts);
    LinearMap::from_fn(parts[i].clone(), prod, |s| {
        Vector::term(&tagged(i, s), Scalar::one(parts[i].tag()))
    })
}

/// Pairing `⟨f₁, …, fₙ⟩ : W → V₁ × ⋯ × Vₙ` of maps with a common domain.
pub fn pairing(maps: &[&LinearMap]) -> LinearMap {
    assert!(!maps.is_empty());
    let dom = maps[0].domain.clone();
    for m in maps {
        assert_eq!(m.domain, dom, "pairing of maps with different domains");
    }
    let cods: Vec<&BasedModule> = maps.iter().map(|m| &m.codomain).collect();
    let prod = product_module(&cods);
    LinearMap::from_fn(dom, prod, |s| {
        let mut out = Vector::zero();
        for (i, m) in maps.iter().enumerate() {
            for (sym, c) in m.column(s).iter() {
                out.add_term(&tagged(i, sym), c);
            }
        }
        out
    })
}

/// Product of maps `f₁ × ⋯ × fₙ` acting componentwise.
pub fn product_map(maps: &[&LinearMap]) -> LinearMap {
    let doms: Vec<&BasedModule> = maps.iter().map(|m| &m.domain).collect();
    let paired: Vec<LinearMap> = maps
        .iter()
        .enumerate()
        .map(|(i, m)| m.compose(&projection(&doms, i)))
        .collect();
    pairing(&paired.iter().collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldTag;

    fn q() -> FieldTag {
        FieldTag::Q
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n, q())
    }

    #[test]
    fn kernel_of_injective_map_is_empty() {
        let m = BasedModule::from_names(&["e1", "e2"], q());
        let id = LinearMap::identity(&m);
        assert!(solve_kernel(&id).is_empty());
    }

    #[test]
    fn kernel_of_rank_one_map() {
        // Matrix [[1,1],[1,1]] has kernel spanned by (1, -1); the hand
        // row-reduction fixes the echelon form e1 - e2.
        let m = BasedModule::from_names(&["e1", "e2"], q());
        let f = LinearMap::from_fn(m.clone(), m.clone(), |_| {
            Vector::from_terms(&[("e1", s(1)), ("e2", s(1))])
        });
        let k = solve_kernel(&f);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], Vector::from_terms(&[("e1", s(1)), ("e2", s(-1))]));
    }

    #[test]
    fn kernel_of_zero_map_is_everything() {
        let m = BasedModule::from_names(&["a", "b", "c"], q());
        let z = LinearMap::zero(&m, &m);
        assert_eq!(solve_kernel(&z).len(), 3);
    }

    #[test]
    fn quotient_dimensions() {
        let m = BasedModule::from_names(&["e1", "e2", "e3"], q());
        // No relations: identity projection.
        let tr = quotient_basis(&m, &[]);
        assert_eq!(tr.module.dim(), 3);
        // Relations spanning everything: zero quotient.
        let all: Vec<Vector> = m.basis().iter().map(|b| m.gen(b)).collect();
        assert_eq!(quotient_basis(&m, &all).module.dim(), 0);
        // One relation e1 - e2: rank-nullity gives dimension 2, and both
        // sides of the relation project to the same class.
        let r = Vector::from_terms(&[("e1", s(1)), ("e2", s(-1))]);
        let qt = quotient_basis(&m, &[r]);
        assert_eq!(qt.module.dim(), 2);
        assert_eq!(
            qt.projection.apply(&m.gen("e1")),
            qt.projection.apply(&m.gen("e2"))
        );
    }

    #[test]
    fn product_round_trip() {
        let v = BasedModule::from_names(&["x", "y"], q());
        let parts = [&v, &v];
        let p0 = projection(&parts, 0);
        let i1 = injection(&parts, 1);
        // π₀ ∘ ι₁ = 0 and π₁ ∘ ι₁ = id.
        assert_eq!(p0.compose(&i1), LinearMap::zero(&v, &v));
        let p1 = projection(&parts, 1);
        assert_eq!(p1.compose(&i1), LinearMap::identity(&v));
    }

    #[test]
    fn rank_nullity_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(1..5usize);
            let names: Vec<String> = (0..n).map(|i| format!("b{i}")).collect();
            let m = BasedModule::new(names.clone(), q());
            let k = rng.gen_range(0..4usize);
            let rels: Vec<Vector> = (0..k)
                .map(|_| {
                    let mut v = Vector::zero();
                    for name in &names {
                        v.add_term(name, &s(rng.gen_range(-3..4)));
                    }
                    v
                })
                .collect();
            let rank = echelon_basis(&m, &rels).len();
            let qt = quotient_basis(&m, &rels);
            assert_eq!(m.dim(), qt.module.dim() + rank);
        }
    }
}
