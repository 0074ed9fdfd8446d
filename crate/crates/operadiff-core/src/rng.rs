//! Seeded, reproducible random data for the property suites: free-algebra
//! elements, vectors, and linear maps.  Coefficients are drawn from
//! `{−3,…,3}` and elements have at most four terms, keeping counterexamples
//! small and printable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::free::{enumerate_terms, FreeElement};
use crate::linalg::{BasedModule, LinearMap, Vector};
use crate::operad::Operad;
use crate::scalar::Scalar;

/// The project-wide deterministic generator.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_coeff(op_tag: crate::scalar::FieldTag, rng: &mut ChaCha8Rng) -> Scalar {
    let mut c = 0i64;
    while c == 0 {
        c = rng.gen_range(-3..=3);
    }
    Scalar::from_int(c, op_tag)
}

/// A random vector with small integer coordinates (possibly zero entries,
/// never the empty module's zero unless the module is trivial).
pub fn random_vector(module: &BasedModule, rng: &mut ChaCha8Rng) -> Vector {
    let mut v = Vector::zero();
    for s in module.basis() {
        let c = rng.gen_range(-3..=3i64);
        v.add_term(s, &Scalar::from_int(c, module.tag()));
    }
    v
}

/// A random linear map with small integer matrix entries.
pub fn random_linear_map(
    dom: &BasedModule,
    cod: &BasedModule,
    rng: &mut ChaCha8Rng,
) -> LinearMap {
    let mut columns = std::collections::BTreeMap::new();
    for s in dom.basis() {
        let mut col = Vector::zero();
        for t in cod.basis() {
            let c = rng.gen_range(-2..=2i64);
            col.add_term(t, &Scalar::from_int(c, cod.tag()));
        }
        if !col.is_zero() {
            columns.insert(s.clone(), col);
        }
    }
    LinearMap::new(dom.clone(), cod.clone(), columns)
}

/// A random element of `S(P, vars)` truncated at `max_arity`: at most four
/// canonical terms with nonzero small coefficients.
pub fn random_element(
    op: &Operad,
    vars: &BasedModule,
    max_arity: usize,
    rng: &mut ChaCha8Rng,
) -> FreeElement {
    let mut pool = Vec::new();
    for n in 0..=max_arity {
        pool.extend(enumerate_terms(op, vars, n));
    }
    let mut el = FreeElement::zero();
    if pool.is_empty() {
        return el;
    }
    let k = rng.gen_range(1..=4usize);
    for _ in 0..k {
        let t = pool[rng.gen_range(0..pool.len())].clone();
        el.add_term(t, &random_coeff(op.tag, rng));
    }
    el
}
