//! Acceptance suite: one test — and therefore one pass/fail line — per
//! criterion.  Every comparison is exact equality over ℚ; no tolerances.

use std::collections::BTreeMap;
use std::sync::Arc;

use operadiff::algebra::{
    abelian_lie_algebra, check_differential_object_alg, check_tangent_equations,
    check_tangent_equations_with, derivation_bracket, derivation_from_vector_field,
    derivation_space, is_derivation, is_differential_object, is_vector_field, lie_he_algebra,
    pointed_dual_module, poly_mod_algebra, standard_endomorphisms, tangent_maps,
    upper_triangular_algebra, vector_field_from_derivation, zero_com_algebra, PAlgebra,
};
use operadiff::adjoint::{
    adjoint_bundle, check_backend_agreement, check_free_differential_object,
    check_free_triangles, diff_object_from_p0_module, kahler_truncated, tau_free_iso,
};
use operadiff::expr::{parse_element, render, VarTable};
use operadiff::free::{
    canonicalize, check_dc_axioms, check_lambda_axioms, check_monad_laws, diff_transform,
    functor_map, partial_from_lambda, FreeElement,
};
use operadiff::linalg::{product_module, split_tag, tagged, BasedModule, LinearMap, Vector};
use operadiff::operad::{
    make_ass, make_com, make_lie, make_pointed_operad, AssocAlgebra, Operad, OperadElement,
};
use operadiff::ppoly::{check_cdc_properties, chain_rhs, ppoly_compose, ppoly_diff, PPolyMap};
use operadiff::rng::{random_element, random_linear_map, seeded};
use operadiff::scalar::{FieldTag, Scalar};

const SEED: u64 = 2024;

fn q(n: i64) -> Scalar {
    Scalar::from_int(n, FieldTag::Q)
}

fn qvars(names: &[&str]) -> BasedModule {
    BasedModule::new(names.iter().map(|s| s.to_string()).collect(), FieldTag::Q)
}

fn all_operads() -> Vec<Operad> {
    vec![
        make_com(FieldTag::Q),
        make_ass(FieldTag::Q),
        make_lie(FieldTag::Q),
        make_pointed_operad(AssocAlgebra::dual_numbers(FieldTag::Q)),
    ]
}

fn test_algebras() -> Vec<PAlgebra> {
    vec![
        poly_mod_algebra(2),
        poly_mod_algebra(3),
        upper_triangular_algebra(),
        lie_he_algebra(),
    ]
}

/// 1. [DC.1]–[DC.6] and [DC.N] on every basis term to arity 4 plus 200
///    seeded random elements, for Com, Ass, Lie, and the pointed operad of
///    the dual numbers.
#[test]
fn criterion_01_dc_axiom_suite() {
    let vars = qvars(&["x", "y"]);
    for op in all_operads() {
        let rep = check_dc_axioms(&op, &vars, 4, 200, SEED);
        assert!(rep.all_passed(), "{}:\n{}", op.id, rep.render_text());
    }
}

/// 2. Tangent-monad distributive-law equalities, plus the closed-form
///    round trip `partial_from_lambda ≡ diff_transform` on 200 random
///    elements per operad.
#[test]
fn criterion_02_lambda_tangent_monad_suite() {
    let vars = qvars(&["x", "y"]);
    for op in all_operads() {
        let rep = check_lambda_axioms(&op, &vars, 4, 200, SEED);
        assert!(rep.all_passed(), "{}:\n{}", op.id, rep.render_text());
        let mut rng = seeded(SEED ^ 0x5eed);
        for _ in 0..200 {
            let el = random_element(&op, &vars, 4, &mut rng);
            assert_eq!(
                partial_from_lambda(&op, &el),
                diff_transform(&op, &el),
                "{}: ∂-from-λ mismatch on {el}",
                op.id
            );
        }
    }
}

/// 3. Monad laws to arity 4, and naturality of ∂ under 100 random linear
///    variable changes per operad.
#[test]
fn criterion_03_monad_laws_and_naturality() {
    let vars = qvars(&["x", "y"]);
    let wvars = qvars(&["u", "v"]);
    for op in all_operads() {
        let rep = check_monad_laws(&op, &vars, 4, 100, SEED);
        assert!(rep.all_passed(), "{}:\n{}", op.id, rep.render_text());

        // Naturality: S(f×f) ∘ ∂ = ∂ ∘ S(f) for random f : V → W.
        let vv = product_module(&[&vars, &vars]);
        let ww = product_module(&[&wvars, &wvars]);
        let mut rng = seeded(SEED ^ 0xa11);
        for _ in 0..100 {
            let f = random_linear_map(&vars, &wvars, &mut rng);
            let ff = LinearMap::from_fn(vv.clone(), ww.clone(), |s| {
                let (tag, name) = split_tag(s).expect("tagged symbol");
                f.column(name).map_symbols(|t| tagged(tag, t))
            });
            let el = random_element(&op, &vars, 3, &mut rng);
            assert_eq!(
                functor_map(&op, &ff, &diff_transform(&op, &el)),
                diff_transform(&op, &functor_map(&op, &f, &el)),
                "{}: ∂ not natural on {el}",
                op.id
            );
        }
    }
}

/// 4. Com oracle: the operadic ∂ matches an independent textbook
///    polynomial differentiator on 100 random polynomials in ≤ 3 variables
///    of degree ≤ 5.
#[test]
fn criterion_04_com_textbook_oracle() {
    let op = make_com(FieldTag::Q);
    let names = ["x", "y", "z"];
    let mut rng = seeded(SEED ^ 0x0c0);
    use rand::Rng;

    // A polynomial as exponent-vector → integer coefficient; the textbook
    // differential keeps no operadic structure at all.
    type Poly = BTreeMap<[usize; 3], i64>;
    let textbook_diff = |p: &Poly| -> Vec<([usize; 3], usize, i64)> {
        let mut out = Vec::new();
        for (&exps, &c) in p {
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    let mut dexps = exps;
                    dexps[i] -= 1;
                    out.push((dexps, i, c * e as i64));
                }
            }
        }
        out
    };
    // Embeddings into the free Com-algebra on {x,y,z} and on the doubled
    // variable set.
    let embed = |exps: &[usize; 3]| -> Vec<String> {
        let mut w = Vec::new();
        for (i, &e) in exps.iter().enumerate() {
            w.extend(std::iter::repeat_n(names[i].to_string(), e));
        }
        w
    };
    let com_basis = |n: usize| OperadElement::basis(n, &format!("c{n}"), FieldTag::Q);

    for _ in 0..100 {
        let mut p: Poly = BTreeMap::new();
        for _ in 0..rng.gen_range(1..=5usize) {
            let mut exps = [0usize; 3];
            let total = rng.gen_range(0..=5usize);
            for _ in 0..total {
                exps[rng.gen_range(0..3usize)] += 1;
            }
            *p.entry(exps).or_insert(0) += rng.gen_range(-3..=3i64);
        }
        p.retain(|_, c| *c != 0);

        // Operadic route.
        let mut f_el = FreeElement::zero();
        for (exps, &c) in &p {
            let w = embed(exps);
            f_el = f_el.add(&canonicalize(&op, &com_basis(w.len()), &w).scale(&q(c)));
        }
        let got = diff_transform(&op, &f_el);

        // Textbook route: Σᵢ ∂f/∂xᵢ · dxᵢ, assembled term by term.
        let mut want = FreeElement::zero();
        for (dexps, i, c) in textbook_diff(&p) {
            let mut w: Vec<String> = embed(&dexps).iter().map(|s| tagged(0, s)).collect();
            w.push(tagged(1, names[i]));
            want = want.add(&canonicalize(&op, &com_basis(w.len()), &w).scale(&q(c)));
        }
        assert_eq!(got, want, "∂ disagrees with the textbook differential");
    }
}

/// 5. Tangent-equation suite on the four test algebras; mutating any one
///    structure map produces a reported counterexample.
#[test]
fn criterion_05_tangent_equations_and_mutations() {
    for a in test_algebras() {
        let rep = check_tangent_equations(&a, &standard_endomorphisms(&a), 3);
        assert!(rep.all_passed(), "{}:\n{}", a.id, rep.render_text());
    }

    let a = poly_mod_algebra(2);
    let endos = standard_endomorphisms(&a);
    let two = q(2);
    for which in ["p", "z", "s", "q1", "q2", "l", "c"] {
        let mut tm = tangent_maps(&a);
        let target = match which {
            "p" => &mut tm.p,
            "z" => &mut tm.z,
            "s" => &mut tm.s,
            "q1" => &mut tm.q[0],
            "q2" => &mut tm.q[1],
            "l" => &mut tm.l,
            _ => &mut tm.c,
        };
        let old = target.map.clone();
        target.map = LinearMap::from_fn(old.domain.clone(), old.codomain.clone(), |s| {
            old.column(s).scale(&two)
        });
        let rep = check_tangent_equations_with(&a, &tm, &endos, 3);
        assert!(!rep.all_passed(), "mutated {which} went undetected");
        assert!(
            rep.failures()
                .any(|c| c.counterexample.as_deref().is_some_and(|w| !w.is_empty())),
            "mutated {which}: no counterexample reported"
        );
    }
}

/// 6. Derivation solver: hand-derived dimensions for ℚ[x]/(x²) and
///    ℚ[x]/(x³); every output is a derivation; the commutator stays in the
///    solution space and satisfies the Jacobi identity.
#[test]
fn criterion_06_derivation_solver() {
    let expected = [(poly_mod_algebra(2), 1usize), (poly_mod_algebra(3), 2usize)];
    for (a, dim) in &expected {
        let ders = derivation_space(a);
        assert_eq!(ders.len(), *dim, "dim Der({})", a.id);
        for d in &ders {
            assert_eq!(is_derivation(a, d, 3), None, "{}: solver output", a.id);
        }
        // Commutator closure: the bracket of solver outputs solves the
        // same Leibniz system, hence lies in the solution space.
        for d1 in &ders {
            for d2 in &ders {
                let br = derivation_bracket(d1, d2);
                assert_eq!(is_derivation(a, &br, 3), None, "{}: bracket", a.id);
            }
        }
    }

    // Jacobi on a non-commuting triple from ℚ[x]/(x³).
    let a = poly_mod_algebra(3);
    let ders = derivation_space(&a);
    let d3 = derivation_bracket(&ders[0], &ders[1]);
    let triple = [&ders[0], &ders[1], &d3];
    for s in a.carrier.basis() {
        let mut sum = Vector::zero();
        for i in 0..3 {
            let inner = derivation_bracket(triple[(i + 1) % 3], triple[(i + 2) % 3]);
            sum = sum.add(&derivation_bracket(triple[i], &inner).column(s));
        }
        assert!(sum.is_zero(), "Jacobi fails at {s}");
    }
}

/// 7. Derivations ↔ vector fields: both round trips are identities on all
///    solver outputs for all test algebras.
#[test]
fn criterion_07_vector_field_roundtrips() {
    for a in test_algebras() {
        for d in derivation_space(&a) {
            let v = vector_field_from_derivation(&a, &d);
            assert_eq!(is_vector_field(&v, 3), None, "{}: section check", a.id);
            assert_eq!(
                derivation_from_vector_field(&v),
                d,
                "{}: D ↦ v_D ↦ D",
                a.id
            );
            let v2 = vector_field_from_derivation(&a, &derivation_from_vector_field(&v));
            assert_eq!(v2.map, v.map, "{}: v ↦ D_v ↦ v", a.id);
        }
    }
}

/// Lyndon words on an ordered alphabet, counted by the number of letters
/// from the top `special` block — an independent oracle for the graded
/// dimensions of a free Lie algebra on `letters` generators.
fn lyndon_counts(letters: usize, special: usize, len: usize) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    let mut word = vec![0usize; len];
    loop {
        let is_lyndon = (1..len).all(|r| {
            let rot: Vec<usize> = (0..len).map(|i| word[(i + r) % len]).collect();
            rot > word
        });
        if is_lyndon {
            let count_special = word.iter().filter(|&&l| l >= letters - special).count();
            *out.entry(count_special).or_insert(0) += 1;
        }
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if word[i] + 1 < letters {
                word[i] += 1;
                word[i + 1..].fill(0);
                break;
            }
        }
    }
}

/// 8. τ isomorphism: cell dimensions of T°(S(P,V)) match S(P,V×V) for Com
///    (dim V ≤ 2, degree ≤ 4), Ass (weight ≤ 4), and Lie (dim V = 2,
///    weight ≤ 3, against the Lyndon-count oracle); the adjunction
///    triangle identities hold exactly on these cells.
#[test]
fn criterion_08_tau_isomorphism() {
    let com = Arc::new(make_com(FieldTag::Q));
    for vars in [qvars(&["x"]), qvars(&["x", "y"])] {
        let (_, rep) = tau_free_iso(&com, &vars, 4, 50, SEED);
        assert!(rep.all_passed(), "com dim {}:\n{}", vars.dim(), rep.render_text());
    }
    let ass = Arc::new(make_ass(FieldTag::Q));
    let (_, rep) = tau_free_iso(&ass, &qvars(&["x", "y"]), 4, 50, SEED);
    assert!(rep.all_passed(), "ass:\n{}", rep.render_text());

    let lie = Arc::new(make_lie(FieldTag::Q));
    let (tau, rep) = tau_free_iso(&lie, &qvars(&["x", "y"]), 3, 50, SEED);
    assert!(rep.all_passed(), "lie:\n{}", rep.render_text());
    // Independent oracle: Lyndon words on {x, y, dx, dy} graded by weight
    // and d-letter count.
    for v in 1..=3usize {
        let counts = lyndon_counts(4, 2, v);
        for delta in 0..=v {
            assert_eq!(
                tau.presentation.dim(&[delta, v]),
                counts.get(&delta).copied().unwrap_or(0),
                "lie cell [{delta},{v}]"
            );
        }
    }

    // Triangle identities of the free ⊣ forgetful adjunction.
    for (op, vars) in [
        (com, qvars(&["x"])),
        (ass, qvars(&["x"])),
        (lie, qvars(&["x", "y"])),
    ] {
        let rep = check_free_triangles(&op, &vars, 3);
        assert!(rep.all_passed(), "{} triangles:\n{}", op.id, rep.render_text());
    }
}

/// 9. Backend agreement: the generic truncated T° engine matches the
///    closed forms — `T°(M) = M×M` for the pointed operad, and the
///    hand-computed `Sym_A(Ω_A)` cell dimensions for ℚ[x]/(x²), ℚ[x]/(x³).
#[test]
fn criterion_09_backend_agreement() {
    let m = pointed_dual_module();
    let rep = check_backend_agreement(&m, 2, 3);
    assert!(rep.all_passed(), "pointed:\n{}", rep.render_text());
    let b = adjoint_bundle(&m, 1, 3);
    assert_eq!(b.presentation.dim(&[0]), m.carrier.dim());
    assert_eq!(b.presentation.dim(&[1]), m.carrier.dim());

    // Hand oracles: Ω(ℚ[x]/(x²)) = ⟨dx⟩, Sym² adds x·(dx)²;
    // Ω(ℚ[x]/(x³)) = ⟨dx, x dx⟩ with 3x²dx = 0.
    for (a, kahler_dim, cells) in [
        (poly_mod_algebra(2), 1usize, vec![2usize, 1, 1]),
        (poly_mod_algebra(3), 2usize, vec![3, 2, 2]),
    ] {
        assert_eq!(kahler_truncated(&a, 4).dim(&[1]), kahler_dim, "Ω({})", a.id);
        let b = adjoint_bundle(&a, 2, 4);
        let dims: Vec<usize> = (0..=2).map(|d| b.presentation.dim(&[d])).collect();
        assert_eq!(dims, cells, "Sym cells of {}", a.id);
        let rep = check_backend_agreement(&a, 2, 4);
        assert!(rep.all_passed(), "{}:\n{}", a.id, rep.render_text());
    }
}

/// 10. Differential objects: the algebra-level and free-algebra criteria
///     agree on every test algebra; the free suites pass for Com, Ass,
///     Lie; the abelian Lie algebra is a differential object and the
///     nonabelian one is not.
#[test]
fn criterion_10_differential_objects() {
    let mut pool = test_algebras();
    pool.push(abelian_lie_algebra(2));
    pool.push(pointed_dual_module());
    pool.push(zero_com_algebra());
    for a in &pool {
        let rep = check_differential_object_alg(a, 3);
        assert_eq!(
            rep.all_passed(),
            is_differential_object(a, 3),
            "{}: the two criteria disagree:\n{}",
            a.id,
            rep.render_text()
        );
    }
    assert!(is_differential_object(&abelian_lie_algebra(2), 3));
    assert!(!is_differential_object(&lie_he_algebra(), 3));
    assert!(is_differential_object(&zero_com_algebra(), 3));

    // Free algebras split as differential objects.
    let com = Arc::new(make_com(FieldTag::Q));
    let ass = Arc::new(make_ass(FieldTag::Q));
    let lie = Arc::new(make_lie(FieldTag::Q));
    for (op, vars) in [
        (&com, qvars(&["x"])),
        (&ass, qvars(&["x"])),
        (&lie, qvars(&["x", "y"])),
    ] {
        let rep = check_free_differential_object(op, &vars, 3);
        assert!(rep.all_passed(), "{} free:\n{}", op.id, rep.render_text());
    }

    // The P(1)-module route agrees where it applies.
    let rep = diff_object_from_p0_module(&com, &qvars(&["x"]), None, 3).unwrap();
    assert!(rep.all_passed(), "com module route:\n{}", rep.render_text());
    let m = pointed_dual_module();
    let pointed = m.operad.clone();
    let rep = diff_object_from_p0_module(&pointed, &m.carrier.clone(), Some(&m), 3).unwrap();
    assert!(rep.all_passed(), "pointed module route:\n{}", rep.render_text());
    assert!(diff_object_from_p0_module(&ass, &qvars(&["x"]), None, 3).is_err());
}

/// 11. P-POLY is a Cartesian differential category: chain rule and
///     second-derivative symmetry on 100 random pairs per operad, and the
///     worked case f(x) = x², g(y) = y² gives 4x³·dx on both sides.
#[test]
fn criterion_11_cdc_properties() {
    for op in all_operads() {
        let rep = check_cdc_properties(&op, 100, SEED);
        assert!(rep.all_passed(), "{}:\n{}", op.id, rep.render_text());
    }

    let op = make_com(FieldTag::Q);
    let sq = |v: &str| {
        canonicalize(
            &op,
            &OperadElement::basis(2, "c2", FieldTag::Q),
            &[v.to_string(), v.to_string()],
        )
    };
    let f = PPolyMap::new(&["x1"], vec![sq("x1")]);
    let g = PPolyMap::new(&["x1"], vec![sq("x1")]);
    let gf = ppoly_compose(&op, &g, &f);
    let lhs = ppoly_diff(&op, &gf);
    let rhs = chain_rhs(&op, &g, &f);
    assert_eq!(lhs, rhs, "chain rule on the worked pair");
    // Both must literally be 4·x³·dx.
    let word = vec![
        tagged(0, "x1"),
        tagged(0, "x1"),
        tagged(0, "x1"),
        tagged(1, "x1"),
    ];
    let want = canonicalize(&op, &OperadElement::basis(4, "c4", FieldTag::Q), &word).scale(&q(4));
    assert_eq!(lhs.components, vec![want]);
}

/// 12. CLI: the three documented invocations produce their stated outputs
///     bit-exactly with the default seed, and parse/render round-trips
///     hold on 200 random expressions per flavor.
#[test]
fn criterion_12_cli_and_roundtrips() {
    let run = |args: &[&str]| {
        let mut argv = vec!["operadiff"];
        argv.extend_from_slice(args);
        operadiff::cli::run(argv)
    };

    let (code, out) = run(&["differentiate", "--operad", "com", "x^2"]);
    assert_eq!((code, out.as_str()), (0, "2*x*dx\n"));

    let (code, out) = run(&[
        "check-dc", "--operad", "lie", "--arity", "4", "--trials", "200", "--seed", "7",
    ]);
    assert_eq!(code, 0, "check-dc:\n{out}");
    assert!(out.ends_with("checks passed\n"));

    let spec = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/dualnumbers.toml");
    let (code, out) = run(&["derivations", "--algebra", spec]);
    assert_eq!((code, out.as_str()), (0, "dim Der = 1; basis: D(x)=x\n"));

    // Parse/render round trips on random elements per flavor.
    let names = ["x", "y"];
    let table = VarTable::plain(&names);
    for op in [
        make_com(FieldTag::Q),
        make_ass(FieldTag::Q),
        make_lie(FieldTag::Q),
    ] {
        let vars = qvars(&names);
        let max_arity = if op.is_lie() { 3 } else { 4 };
        let mut rng = seeded(SEED ^ 0xc11);
        for _ in 0..200 {
            let el = random_element(&op, &vars, max_arity, &mut rng);
            let text = render(&op, &table, &el);
            let back = parse_element(&op, &table, &text)
                .unwrap_or_else(|e| panic!("{}: reparse of {text:?}: {e}", op.id));
            assert_eq!(back, el, "{}: round trip of {text:?}", op.id);
        }
    }
}
