//! The Lawvere theory `P-POLY` of `P`-polynomials as a Cartesian
//! differential category: a map `n → m` is an `m`-tuple of elements of
//! `S(P, Rⁿ)`, composition is Kleisli substitution, and the differential
//! combinator applies `∂` component-wise.
//!
//! Source variables are explicit symbol lists.  The doubled source produced
//! by [`ppoly_diff`] uses the product tags (`0#x` = point block, `1#x` =
//! tangent block); tags nest unambiguously under repeated differentiation,
//! and the rendering layer translates one level of tags to the `dx` names.

use std::fmt;

use crate::free::{
    apply_letters, bind, diff_transform, monad_unit, FreeElement,
};
use crate::linalg::{BasedModule, Vector};
use crate::operad::Operad;
use crate::report::Report;
use crate::scalar::Scalar;

/// A morphism `n → m` of `P-POLY`: named source variables and one free
/// element per target coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PPolyMap {
    pub source_vars: Vec<String>,
    pub components: Vec<FreeElement>,
}

impl PPolyMap {
    pub fn new(source_vars: &[&str], components: Vec<FreeElement>) -> Self {
        PPolyMap {
            source_vars: source_vars.iter().map(|s| s.to_string()).collect(),
            components,
        }
    }

    pub fn source_arity(&self) -> usize {
        self.source_vars.len()
    }

    pub fn target_arity(&self) -> usize {
        self.components.len()
    }

    pub fn source_module(&self, tag: crate::scalar::FieldTag) -> BasedModule {
        let mut names = self.source_vars.clone();
        names.sort();
        BasedModule::new(names, tag)
    }
}

impl fmt::Display for PPolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "⟩ over ({})", self.source_vars.join(","))
    }
}

/// Conventional variable names `x1,…,xn`.
pub fn std_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// The identity `n → n`: the tuple of unit variables.
pub fn ppoly_id(op: &Operad, n: usize) -> PPolyMap {
    let vars = std_vars(n);
    let components = vars
        .iter()
        .map(|v| monad_unit(op, &Vector::term(v, Scalar::one(op.tag))))
        .collect();
    PPolyMap {
        source_vars: vars,
        components,
    }
}

/// Kleisli composition `g ∘ f`: substitutes the components of `f` for the
/// source variables of `g`.
pub fn ppoly_compose(op: &Operad, g: &PPolyMap, f: &PPolyMap) -> PPolyMap {
    assert_eq!(
        g.source_arity(),
        f.target_arity(),
        "composing {}→{} after {}→{}",
        f.source_arity(),
        f.target_arity(),
        g.source_arity(),
        g.target_arity()
    );
    let components = g
        .components
        .iter()
        .map(|c| {
            bind(op, c, &|s| {
                let j = g
                    .source_vars
                    .iter()
                    .position(|v| v == s)
                    .expect("component variable is a declared source variable");
                f.components[j].clone()
            })
        })
        .collect();
    PPolyMap {
        source_vars: f.source_vars.clone(),
        components,
    }
}

/// The differential combinator `D[⟨P₁,…,P_m⟩] = ⟨∂P₁,…,∂P_m⟩ : 2n → m`,
/// with the doubled source `(0#-block, 1#-block)`.
pub fn ppoly_diff(op: &Operad, f: &PPolyMap) -> PPolyMap {
    let mut source_vars: Vec<String> =
        f.source_vars.iter().map(|v| format!("0#{v}")).collect();
    source_vars.extend(f.source_vars.iter().map(|v| format!("1#{v}")));
    PPolyMap {
        source_vars,
        components: f
            .components
            .iter()
            .map(|c| diff_transform(op, c))
            .collect(),
    }
}

/// Tuple pairing `⟨f, g⟩` of maps with the same source.
pub fn ppoly_pair(f: &PPolyMap, g: &PPolyMap) -> PPolyMap {
    assert_eq!(f.source_vars, g.source_vars, "pairing needs a common source");
    let mut components = f.components.clone();
    components.extend(g.components.iter().cloned());
    PPolyMap {
        source_vars: f.source_vars.clone(),
        components,
    }
}

/// Projection `πᵢ : n → 1` (0-based coordinate).
pub fn ppoly_proj(op: &Operad, n: usize, i: usize) -> PPolyMap {
    let vars = std_vars(n);
    let component = monad_unit(op, &Vector::term(&vars[i], Scalar::one(op.tag)));
    PPolyMap {
        source_vars: vars,
        components: vec![component],
    }
}

/// The chain-rule right-hand side `D[g] ∘ ⟨f∘π₁-block, D[f]⟩` as a map
/// `2n → k`, sharing the doubled source of `D[f]`.
pub fn chain_rhs(op: &Operad, g: &PPolyMap, f: &PPolyMap) -> PPolyMap {
    let df = ppoly_diff(op, f);
    // f on the point block: rename each variable x ↦ 0#x.
    let f_pt: Vec<FreeElement> = f
        .components
        .iter()
        .map(|c| {
            apply_letters(op, c, |s| {
                Vector::term(&format!("0#{s}"), Scalar::one(op.tag))
            })
        })
        .collect();
    let mut inner_components = f_pt;
    inner_components.extend(df.components.iter().cloned());
    let inner = PPolyMap {
        source_vars: df.source_vars.clone(),
        components: inner_components,
    };
    ppoly_compose(op, &ppoly_diff(op, g), &inner)
}

/// Derived-property suite: category laws, product laws, the chain rule,
/// tangent additivity, linearity of linear maps, second-derivative symmetry
/// and the [DC.5] lift identity — all on seeded random `P`-polynomial maps.
pub fn check_cdc_properties(op: &Operad, trials: usize, seed: u64) -> Report {
    let mut rng = crate::rng::seeded(seed);
    let mut report = Report::new("check-cdc", &op.id, "Cartesian differential category laws")
        .with_seed(seed)
        .with_bounds(&format!("trials={trials}, arity<=2"));
    let one = Scalar::one(op.tag);

    let random_map = |n: usize, m: usize, rng: &mut rand_chacha::ChaCha8Rng| -> PPolyMap {
        let vars = std_vars(n);
        let module = BasedModule::new(vars.clone(), op.tag);
        let components = (0..m)
            .map(|_| crate::rng::random_element(op, &module, 2, rng))
            .collect();
        PPolyMap {
            source_vars: vars,
            components,
        }
    };

    // Category laws.
    let mut ok = true;
    for i in 0..trials {
        let f = random_map(2, 2, &mut rng);
        let g = random_map(2, 2, &mut rng);
        let h = random_map(2, 1, &mut rng);
        let assoc_l = ppoly_compose(op, &ppoly_compose(op, &h, &g), &f);
        let assoc_r = ppoly_compose(op, &h, &ppoly_compose(op, &g, &f));
        let id_l = ppoly_compose(op, &ppoly_id(op, 2), &f);
        let id_r = ppoly_compose(op, &f, &ppoly_id(op, 2));
        if assoc_l != assoc_r || id_l != f || id_r != f {
            report.fail(
                "cdc.category",
                "P-POLY is a category",
                &format!("trial {i}: f = {f}, g = {g}, h = {h}"),
            );
            ok = false;
            break;
        }
    }
    if ok {
        report.pass("cdc.category", "P-POLY is a category");
    }

    // Product laws: projections of a pairing recover the components.
    ok = true;
    for i in 0..trials {
        let f = random_map(2, 1, &mut rng);
        let g = random_map(2, 1, &mut rng);
        let paired = ppoly_pair(&f, &g);
        let p0 = ppoly_compose(op, &ppoly_proj(op, 2, 0), &paired);
        let p1 = ppoly_compose(op, &ppoly_proj(op, 2, 1), &paired);
        if p0 != f || p1 != g {
            report.fail(
                "cdc.products",
                "pairing/projection universal equations",
                &format!("trial {i}: f = {f}, g = {g}"),
            );
            ok = false;
            break;
        }
    }
    if ok {
        report.pass("cdc.products", "pairing/projection universal equations");
    }

    // Chain rule D[g∘f] = D[g] ∘ ⟨f∘π₁, D[f]⟩.
    ok = true;
    for i in 0..trials {
        let f = random_map(2, 2, &mut rng);
        let g = random_map(2, 1, &mut rng);
        let lhs = ppoly_diff(op, &ppoly_compose(op, &g, &f));
        let rhs = chain_rhs(op, &g, &f);
        if lhs != rhs {
            report.fail(
                "cdc.chain-rule",
                "the chain rule",
                &format!("trial {i}: f = {f}, g = {g}, lhs = {lhs}, rhs = {rhs}"),
            );
            ok = false;
            break;
        }
    }
    if ok {
        report.pass("cdc.chain-rule", "the chain rule");
    }

    // Additivity in the tangent block: substituting dx ↦ dx + ex splits.
    ok = true;
    for i in 0..trials {
        let f = random_map(2, 1, &mut rng);
        let df = &ppoly_diff(op, &f).components[0];
        let both = apply_letters(op, df, |s| {
            let (tag, rest) = s.split_once('#').unwrap();
            if tag == "1" {
                let mut v = Vector::term(s, one.clone());
                v.add_term(&format!("2#{rest}"), &one);
                v
            } else {
                Vector::term(s, one.clone())
            }
        });
        let second = apply_letters(op, df, |s| {
            let (tag, rest) = s.split_once('#').unwrap();
            if tag == "1" {
                Vector::term(&format!("2#{rest}"), one.clone())
            } else {
                Vector::term(s, one.clone())
            }
        });
        if both != df.add(&second) {
            report.fail(
                "cdc.additivity",
                "additivity in the tangent variable",
                &format!("trial {i}: f = {f}"),
            );
            ok = false;
            break;
        }
    }
    if ok {
        report.pass("cdc.additivity", "additivity in the tangent variable");
    }

    // Linear maps differentiate to themselves in the tangent block.
    ok = true;
    for i in 0..trials {
        let vars = std_vars(2);
        let module = BasedModule::new(vars.clone(), op.tag);
        let w = crate::rng::random_vector(&module, &mut rng);
        let f = PPolyMap {
            source_vars: vars,
            components: vec![monad_unit(op, &w)],
        };
        let df = &ppoly_diff(op, &f).components[0];
        let expected = monad_unit(op, &w.map_symbols(|s| format!("1#{s}")));
        if *df != expected {
            report.fail(
                "cdc.linear",
                "derivative of a linear map",
                &format!("trial {i}: w = {w}"),
            );
            ok = false;
            break;
        }
    }
    if ok {
        report.pass("cdc.linear", "derivative of a linear map");
    }

    // Second derivative: middle-swap symmetry and the DC.5 lift identity.
    ok = true;
    let mut ok5 = true;
    for i in 0..trials {
        let f = random_map(2, 1, &mut rng);
        let ddf = &ppoly_diff(op, &ppoly_diff(op, &f)).components[0];
        let swapped = apply_letters(op, ddf, |s| {
            let (a, rest) = s.split_once('#').unwrap();
            let (b, base) = rest.split_once('#').unwrap();
            let (a2, b2) = match (a, b) {
                ("0", "1") => ("1", "0"),
                ("1", "0") => ("0", "1"),
                other => other,
            };
            Vector::term(&format!("{a2}#{b2}#{base}"), one.clone())
        });
        if ok && swapped != *ddf {
            report.fail(
                "cdc.symmetry",
                "symmetry of the second derivative",
                &format!("trial {i}: f = {f}"),
            );
            ok = false;
        }
        let lifted = apply_letters(op, ddf, |s| {
            let (a, rest) = s.split_once('#').unwrap();
            let (b, base) = rest.split_once('#').unwrap();
            match (a, b) {
                ("0", "0") => Vector::term(&format!("0#{base}"), one.clone()),
                ("1", "1") => Vector::term(&format!("1#{base}"), one.clone()),
                _ => Vector::zero(),
            }
        });
        if ok5 && lifted != ppoly_diff(op, &f).components[0] {
            report.fail(
                "cdc.lift",
                "the lift identity",
                &format!("trial {i}: f = {f}"),
            );
            ok5 = false;
        }
        if !ok && !ok5 {
            break;
        }
    }
    if ok {
        report.pass("cdc.symmetry", "symmetry of the second derivative");
    }
    if ok5 {
        report.pass("cdc.lift", "the lift identity");
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::FreeTerm;
    use crate::operad::{make_ass, make_com, make_lie};
    use crate::scalar::FieldTag;

    fn q() -> FieldTag {
        FieldTag::Q
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n, q())
    }

    #[test]
    fn com_substitution_squares() {
        // g(y) = y², f(x) = x² → (g∘f)(x) = x⁴.
        let com = make_com(q());
        let f = PPolyMap::new(
            &["x1"],
            vec![FreeElement::single(FreeTerm::new("c2", &["x1", "x1"]), s(1))],
        );
        let g = PPolyMap::new(
            &["x1"],
            vec![FreeElement::single(FreeTerm::new("c2", &["x1", "x1"]), s(1))],
        );
        let gf = ppoly_compose(&com, &g, &f);
        assert_eq!(
            gf.components[0],
            FreeElement::single(FreeTerm::new("c4", &["x1", "x1", "x1", "x1"]), s(1))
        );
    }

    #[test]
    fn ass_substitution_scales() {
        // g(y) = y⊗y, f(x) = 2x → g∘f = 4·x⊗x.
        let ass = make_ass(q());
        let yy = FreeElement::single(FreeTerm::new("p1.2", &["x1", "x1"]), s(1));
        let g = PPolyMap::new(&["x1"], vec![yy]);
        let f = PPolyMap::new(
            &["x1"],
            vec![FreeElement::single(FreeTerm::new("p1", &["x1"]), s(2))],
        );
        let gf = ppoly_compose(&ass, &g, &f);
        assert_eq!(
            gf.components[0],
            FreeElement::single(FreeTerm::new("p1.2", &["x1", "x1"]), s(4))
        );
    }

    #[test]
    fn diff_examples() {
        let com = make_com(q());
        // ⟨x²⟩ → ⟨2·x·dx⟩.
        let f = PPolyMap::new(
            &["x1"],
            vec![FreeElement::single(FreeTerm::new("c2", &["x1", "x1"]), s(1))],
        );
        let df = ppoly_diff(&com, &f);
        assert_eq!(
            df.components[0],
            FreeElement::single(FreeTerm::new("c2", &["0#x1", "1#x1"]), s(2))
        );
        // Identity differentiates to the tangent variable.
        let id = ppoly_id(&com, 1);
        let did = ppoly_diff(&com, &id);
        assert_eq!(
            did.components[0],
            FreeElement::single(FreeTerm::new("c1", &["1#x1"]), s(1))
        );
    }

    #[test]
    fn lie_diff_is_leibniz_over_brackets() {
        // ⟨[x,[y,x]]⟩ → the three-term Leibniz expansion, renormalized.
        let lie = make_lie(q());
        let t = FreeTerm::new("(.(..))", &["x1", "x2", "x1"]);
        let f = PPolyMap::new(&["x1", "x2"], vec![FreeElement::single(t, s(1))]);
        let df = ppoly_diff(&lie, &f).components[0].clone();
        // Independent expansion: differentiate the raw tree slot by slot and
        // renormalize each summand through canonicalize.
        let mut expected = FreeElement::zero();
        for i in 0..3 {
            let word: Vec<String> = ["x1", "x2", "x1"]
                .iter()
                .enumerate()
                .map(|(j, w)| if i == j { format!("1#{w}") } else { format!("0#{w}") })
                .collect();
            let mu = crate::operad::OperadElement {
                arity: 3,
                vec: crate::linalg::Vector::term("l1.2.3", Scalar::one(q())),
            };
            // (x ∘ graft) — build the same tree through the operad engine:
            // [x,[y,x]] is the right-nested bracket with order (1,2,3).
            expected = expected.add(&crate::free::canonicalize(&lie, &mu, &word));
        }
        assert_eq!(df, expected);
    }

    #[test]
    fn chain_rule_x2_y2() {
        // f(x)=x², g(y)=y²: both sides equal 4·x³·dx.
        let com = make_com(q());
        let f = PPolyMap::new(
            &["x1"],
            vec![FreeElement::single(FreeTerm::new("c2", &["x1", "x1"]), s(1))],
        );
        let lhs = ppoly_diff(&com, &ppoly_compose(&com, &f, &f)).components[0].clone();
        let rhs = chain_rhs(&com, &f, &f).components[0].clone();
        let expected = FreeElement::single(
            FreeTerm::new("c4", &["0#x1", "0#x1", "0#x1", "1#x1"]),
            s(4),
        );
        assert_eq!(lhs, expected);
        assert_eq!(rhs, expected);
    }

    #[test]
    fn cdc_suite_smoke() {
        for op in [make_com(q()), make_ass(q()), make_lie(q())] {
            let r = check_cdc_properties(&op, 8, 23);
            assert!(r.all_passed(), "{}: {}", op.id, r.render_text());
        }
    }

    #[test]
    fn cdc_mutation_breaks_chain_rule() {
        // A wrong "derivative" (dropping the coefficient sum by skipping a
        // slot) must be caught by comparing against the true chain rule.
        let com = make_com(q());
        let f = PPolyMap::new(
            &["x1"],
            vec![FreeElement::single(FreeTerm::new("c2", &["x1", "x1"]), s(1))],
        );
        // Mutated D[f]: forget the factor 2.
        let bad_df = PPolyMap {
            source_vars: ppoly_diff(&com, &f).source_vars.clone(),
            components: vec![FreeElement::single(
                FreeTerm::new("c2", &["0#x1", "1#x1"]),
                s(1),
            )],
        };
        let df_g = ppoly_diff(&com, &f);
        // Assemble the chain rhs with the mutated inner derivative.
        let f_pt: Vec<FreeElement> = f
            .components
            .iter()
            .map(|c| {
                apply_letters(&com, c, |sym| {
                    Vector::term(&format!("0#{sym}"), Scalar::one(q()))
                })
            })
            .collect();
        let mut inner_components = f_pt;
        inner_components.extend(bad_df.components.iter().cloned());
        let inner = PPolyMap {
            source_vars: bad_df.source_vars.clone(),
            components: inner_components,
        };
        let rhs = ppoly_compose(&com, &df_g, &inner);
        let lhs = ppoly_diff(&com, &ppoly_compose(&com, &f, &f));
        assert_ne!(lhs, rhs);
    }
}
