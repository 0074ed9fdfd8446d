//! TOML spec files for operads, algebras, and modules.
//!
//! Three kinds share one schema family (`kind` selects the shape):
//!
//! ```toml
//! kind  = "algebra"            # "operad-table" | "algebra" | "module"
//! id    = "dualnumbers"
//! field = "Q"                  # or "F<p>"; default "Q"
//! operad = "com"               # com | ass | lie | pointed (algebras only)
//! basis = ["1", "x"]
//! unit  = "1"                  # optional; symbol or {sym = "p/q"} table
//!
//! [[table]]                    # one entry per structure constant
//! op    = "mul"                # "mul" (Com/Ass), "bracket" (Lie), P(1) symbol (pointed)
//! args  = ["x", "x"]
//! value = {}                   # linear combination {sym = "p/q"}; {} = zero
//! ```
//!
//! Operad tables list components, composition entries (1-based slots), and
//! symmetric-group actions (1-based one-line images).  All rationals are
//! `"p"` or `"p/q"` strings.
//!
//! Loading runs the construction-time axiom gate (overridable for mutation
//! testing); schema violations and verified mathematical violations are
//! kept apart so the CLI can map them to different exit codes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::algebra::{check_algebra_axioms, PAlgebra};
use crate::linalg::{BasedModule, Vector};
use crate::operad::{
    ass_symbol, check_operad_axioms, make_ass, make_com, make_lie, make_pointed_operad,
    make_table_operad, AssocAlgebra, Operad, TableOperadData,
};
use crate::perm::Permutation;
use crate::scalar::{parse_rational, FieldTag};

/// A loading failure: schema errors (malformed input, exit code 2) are kept
/// apart from verified mathematical violations (exit code 1).
#[derive(Debug, Clone)]
pub enum SpecError {
    Schema(String),
    Math(String),
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Schema(m) => write!(f, "schema error: {m}"),
            SpecError::Math(m) => write!(f, "mathematical violation: {m}"),
        }
    }
}

impl std::error::Error for SpecError {}

/// The object described by a spec file.
pub enum SpecObject {
    Operad(Arc<Operad>),
    Algebra(PAlgebra),
    Module(BasedModule),
}

impl SpecObject {
    pub fn into_algebra(self) -> Result<PAlgebra, SpecError> {
        match self {
            SpecObject::Algebra(a) => Ok(a),
            _ => Err(SpecError::Schema("expected an algebra spec file".into())),
        }
    }

    pub fn into_operad(self) -> Result<Arc<Operad>, SpecError> {
        match self {
            SpecObject::Operad(op) => Ok(op),
            _ => Err(SpecError::Schema("expected an operad spec file".into())),
        }
    }
}

// ---------------------------------------------------------------------------
// Raw schema
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: String,
    id: Option<String>,
    field: Option<String>,
    operad: Option<String>,
    basis: Option<Vec<String>>,
    unit: Option<toml::Value>,
    #[serde(default)]
    table: Vec<RawEntry>,
    pointed: Option<RawAssoc>,
    #[serde(default)]
    component: Vec<RawComponent>,
    #[serde(default)]
    compose: Vec<RawCompose>,
    #[serde(default)]
    action: Vec<RawAction>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    op: Option<String>,
    args: Vec<String>,
    value: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAssoc {
    basis: Vec<String>,
    unit: toml::Value,
    #[serde(default)]
    table: Vec<RawEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    arity: usize,
    basis: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompose {
    arity: usize,
    op: String,
    /// 1-based slot index.
    slot: usize,
    with: String,
    value: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    arity: usize,
    op: String,
    /// 1-based one-line images.
    perm: Vec<usize>,
    value: BTreeMap<String, String>,
}

fn schema<T>(r: Result<T, impl fmt::Display>) -> Result<T, SpecError> {
    r.map_err(|e| SpecError::Schema(e.to_string()))
}

fn parse_field(s: Option<&str>) -> Result<FieldTag, SpecError> {
    match s {
        None | Some("Q") | Some("q") => Ok(FieldTag::Q),
        Some(f) => {
            let p = f
                .strip_prefix(['F', 'f'])
                .and_then(|d| d.parse::<u64>().ok())
                .ok_or_else(|| SpecError::Schema(format!("unknown field {f:?}")))?;
            Ok(FieldTag::Fp(p))
        }
    }
}

fn parse_combo(
    raw: &BTreeMap<String, String>,
    module: &BasedModule,
    what: &str,
) -> Result<Vector, SpecError> {
    let mut v = Vector::zero();
    for (sym, c) in raw {
        if !module.contains(sym) {
            return Err(SpecError::Schema(format!(
                "{what}: symbol {sym:?} is not a declared basis element"
            )));
        }
        let c = schema(parse_rational(c, module.tag()))?;
        v.add_term(sym, &c);
    }
    Ok(v)
}

fn parse_unit(
    raw: &toml::Value,
    module: &BasedModule,
    what: &str,
) -> Result<Vector, SpecError> {
    match raw {
        toml::Value::String(sym) => {
            if !module.contains(sym) {
                return Err(SpecError::Schema(format!(
                    "{what}: unit symbol {sym:?} is not a declared basis element"
                )));
            }
            Ok(module.gen(sym))
        }
        toml::Value::Table(t) => {
            let map: BTreeMap<String, String> = t
                .iter()
                .map(|(k, v)| match v {
                    toml::Value::String(s) => Ok((k.clone(), s.clone())),
                    _ => Err(SpecError::Schema(format!(
                        "{what}: coefficients must be rational strings"
                    ))),
                })
                .collect::<Result<_, _>>()?;
            parse_combo(&map, module, what)
        }
        _ => Err(SpecError::Schema(format!(
            "{what}: unit must be a symbol or a coefficient table"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Algebras
// ---------------------------------------------------------------------------

fn binary_key(op: &Operad) -> Result<(usize, String), SpecError> {
    if op.is_com() {
        Ok((2, "c2".to_string()))
    } else if op.is_ass() {
        Ok((2, ass_symbol(&Permutation::identity(2))))
    } else if op.is_lie() {
        Ok((2, "l1.2".to_string()))
    } else {
        Err(SpecError::Schema(format!(
            "operad {} has no binary table operation",
            op.id
        )))
    }
}

fn unit_key(op: &Operad) -> (usize, String) {
    if op.is_com() {
        (0, "c0".to_string())
    } else {
        (0, ass_symbol(&Permutation::identity(0)))
    }
}

fn load_assoc(raw: &RawAssoc, tag: FieldTag) -> Result<AssocAlgebra, SpecError> {
    let module = BasedModule::new(raw.basis.clone(), tag);
    let unit = parse_unit(&raw.unit, &module, "pointed algebra")?;
    let mut mult = BTreeMap::new();
    for e in &raw.table {
        if e.args.len() != 2 {
            return Err(SpecError::Schema(
                "pointed algebra table entries take two arguments".into(),
            ));
        }
        for a in &e.args {
            if !module.contains(a) {
                return Err(SpecError::Schema(format!(
                    "pointed algebra table argument {a:?} is not a basis element"
                )));
            }
        }
        let v = parse_combo(&e.value, &module, "pointed algebra table")?;
        mult.insert((e.args[0].clone(), e.args[1].clone()), v);
    }
    Ok(AssocAlgebra { module, unit, mult })
}

fn load_algebra(raw: &RawSpec, verify: bool) -> Result<PAlgebra, SpecError> {
    let tag = parse_field(raw.field.as_deref())?;
    let id = raw.id.clone().unwrap_or_else(|| "spec-algebra".to_string());
    let basis = raw
        .basis
        .clone()
        .ok_or_else(|| SpecError::Schema("algebra spec needs a basis".into()))?;
    let carrier = BasedModule::new(basis, tag);

    let operad_name = raw.operad.as_deref().unwrap_or("com");
    let op = Arc::new(match operad_name {
        "com" => make_com(tag),
        "ass" => make_ass(tag),
        "lie" => make_lie(tag),
        "pointed" => {
            let assoc = raw
                .pointed
                .as_ref()
                .ok_or_else(|| {
                    SpecError::Schema("pointed algebra spec needs a [pointed] block".into())
                })?;
            make_pointed_operad(load_assoc(assoc, tag)?)
        }
        other => {
            return Err(SpecError::Schema(format!(
                "unknown operad {other:?} (expected com | ass | lie | pointed)"
            )))
        }
    });

    let mut tables: BTreeMap<(usize, String, Vec<String>), Vector> = BTreeMap::new();
    if let Some(u) = &raw.unit {
        if op.is_lie() || op.is_pointed() {
            return Err(SpecError::Schema(format!(
                "operad {} algebras have no unit entry",
                op.id
            )));
        }
        let (n, sym) = unit_key(&op);
        tables.insert((n, sym, Vec::new()), parse_unit(u, &carrier, "algebra unit")?);
    }

    for e in &raw.table {
        for a in &e.args {
            if !carrier.contains(a) {
                return Err(SpecError::Schema(format!(
                    "table argument {a:?} is not a declared basis element"
                )));
            }
        }
        let v = parse_combo(&e.value, &carrier, "algebra table")?;
        if op.is_pointed() {
            let sym = e.op.clone().ok_or_else(|| {
                SpecError::Schema("pointed algebra entries need an op symbol".into())
            })?;
            if !op.component(1).contains(&sym) {
                return Err(SpecError::Schema(format!(
                    "operation {sym:?} is not in P(1)"
                )));
            }
            if e.args.len() != 1 {
                return Err(SpecError::Schema(
                    "pointed algebra entries take one argument".into(),
                ));
            }
            tables.insert((1, sym, e.args.clone()), v);
            continue;
        }
        let default_name = if op.is_lie() { "bracket" } else { "mul" };
        let name = e.op.as_deref().unwrap_or(default_name);
        if name != default_name {
            return Err(SpecError::Schema(format!(
                "operad {} expects op = {default_name:?}, found {name:?}",
                op.id
            )));
        }
        if e.args.len() != 2 {
            return Err(SpecError::Schema(format!(
                "{default_name} entries take two arguments"
            )));
        }
        let (n, sym) = binary_key(&op)?;
        if op.is_com() {
            // Com tables are looked up on sorted words; contradictory
            // unordered entries are a verified violation.
            let mut key = e.args.clone();
            key.sort();
            if let Some(prev) = tables.get(&(n, sym.clone(), key.clone())) {
                if verify && *prev != v {
                    return Err(SpecError::Math(format!(
                        "product of {:?} is not commutative",
                        e.args
                    )));
                }
            }
            // Store both orders: derived constructions (e.g. the tangent
            // bundle) index tables positionally, matching `com_from_assoc`.
            let swapped = vec![key[1].clone(), key[0].clone()];
            tables.insert((n, sym.clone(), swapped), v.clone());
            tables.insert((n, sym, key), v);
        } else if op.is_lie() {
            let swapped = vec![e.args[1].clone(), e.args[0].clone()];
            let neg = v.neg();
            if let Some(prev) = tables.get(&(n, sym.clone(), swapped.clone())) {
                if verify && *prev != neg {
                    return Err(SpecError::Math(format!(
                        "bracket of {:?} violates antisymmetry",
                        e.args
                    )));
                }
            } else {
                tables.insert((n, sym.clone(), swapped), neg);
            }
            if verify && e.args[0] == e.args[1] && !v.is_zero() {
                return Err(SpecError::Math(format!(
                    "nonzero diagonal bracket [{0}, {0}]",
                    e.args[0]
                )));
            }
            tables.insert((n, sym, e.args.clone()), v);
        } else {
            tables.insert((n, sym, e.args.clone()), v);
        }
    }

    let a = PAlgebra::from_tables(&id, op, carrier, tables);
    if verify {
        let rep = check_algebra_axioms(&a, 3);
        if !rep.all_passed() {
            let first = rep.failures().next().unwrap();
            return Err(SpecError::Math(format!(
                "{}: {}",
                first.name,
                first.counterexample.clone().unwrap_or_default()
            )));
        }
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// Table operads
// ---------------------------------------------------------------------------

fn load_operad(raw: &RawSpec, verify: bool) -> Result<Arc<Operad>, SpecError> {
    let tag = parse_field(raw.field.as_deref())?;
    let id = raw.id.clone().unwrap_or_else(|| "spec-operad".to_string());
    if raw.component.is_empty() {
        return Err(SpecError::Schema(
            "operad-table spec needs [[component]] entries".into(),
        ));
    }
    let max_arity = raw.component.iter().map(|c| c.arity).max().unwrap();
    let mut components = vec![BasedModule::new(Vec::new(), tag); max_arity + 1];
    for c in &raw.component {
        components[c.arity] = BasedModule::new(c.basis.clone(), tag);
    }

    let unit_raw = raw
        .unit
        .as_ref()
        .ok_or_else(|| SpecError::Schema("operad-table spec needs a unit".into()))?;
    if components.len() < 2 {
        return Err(SpecError::Schema("operad-table needs an arity-1 component".into()));
    }
    let unit = parse_unit(unit_raw, &components[1], "operad unit")?;

    let mut pcompose = BTreeMap::new();
    for c in &raw.compose {
        if c.arity > max_arity || !components[c.arity].contains(&c.op) {
            return Err(SpecError::Schema(format!(
                "compose entry references unknown operation {:?} in arity {}",
                c.op, c.arity
            )));
        }
        if c.slot == 0 || c.slot > c.arity {
            return Err(SpecError::Schema(format!(
                "compose slot {} out of range for arity {}",
                c.slot, c.arity
            )));
        }
        let with_arity = components
            .iter()
            .position(|m| m.contains(&c.with))
            .ok_or_else(|| {
                SpecError::Schema(format!("compose entry references unknown operation {:?}", c.with))
            })?;
        let out_arity = c.arity + with_arity - 1;
        if out_arity > max_arity {
            return Err(SpecError::Schema(format!(
                "composite arity {out_arity} exceeds the declared truncation {max_arity}"
            )));
        }
        let v = parse_combo(&c.value, &components[out_arity], "compose value")?;
        pcompose.insert((c.arity, c.op.clone(), c.slot - 1, c.with.clone()), v);
    }

    let mut action = BTreeMap::new();
    for a in &raw.action {
        if a.arity > max_arity || !components[a.arity].contains(&a.op) {
            return Err(SpecError::Schema(format!(
                "action entry references unknown operation {:?} in arity {}",
                a.op, a.arity
            )));
        }
        if a.perm.len() != a.arity {
            return Err(SpecError::Schema(format!(
                "permutation length {} ≠ arity {}",
                a.perm.len(),
                a.arity
            )));
        }
        let zero_based: Vec<usize> = a
            .perm
            .iter()
            .map(|i| {
                i.checked_sub(1).ok_or_else(|| {
                    SpecError::Schema("permutation images are 1-based".into())
                })
            })
            .collect::<Result<_, _>>()?;
        let v = parse_combo(&a.value, &components[a.arity], "action value")?;
        action.insert((a.arity, a.op.clone(), zero_based), v);
    }

    let data = TableOperadData {
        components,
        unit,
        action,
        pcompose,
    };
    let op = make_table_operad(&id, tag, data, verify).map_err(SpecError::Math)?;
    Ok(Arc::new(op))
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// Parses spec-file text; `verify` runs the construction-time axiom gate.
pub fn parse_spec_str(text: &str, verify: bool) -> Result<SpecObject, SpecError> {
    let raw: RawSpec = schema(toml::from_str(text))?;
    match raw.kind.as_str() {
        "algebra" => Ok(SpecObject::Algebra(load_algebra(&raw, verify)?)),
        "operad-table" => Ok(SpecObject::Operad(load_operad(&raw, verify)?)),
        "module" => {
            let tag = parse_field(raw.field.as_deref())?;
            let basis = raw
                .basis
                .clone()
                .ok_or_else(|| SpecError::Schema("module spec needs a basis".into()))?;
            Ok(SpecObject::Module(BasedModule::new(basis, tag)))
        }
        other => Err(SpecError::Schema(format!(
            "unknown kind {other:?} (expected operad-table | algebra | module)"
        ))),
    }
}

/// Loads a spec file from disk.
pub fn parse_spec(path: &Path, verify: bool) -> Result<SpecObject, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SpecError::Schema(format!("cannot read {}: {e}", path.display())))?;
    parse_spec_str(&text, verify)
}

/// Re-runs the axiom gate on an already-loaded object (used after
/// `--no-verify` loads for mutation testing).
pub fn verify_object(obj: &SpecObject) -> crate::report::Report {
    match obj {
        SpecObject::Operad(op) => check_operad_axioms(op, op.max_arity.min(3)),
        SpecObject::Algebra(a) => check_algebra_axioms(a, 3),
        SpecObject::Module(m) => {
            let mut r = crate::report::Report::new("check-module", "-", m.tag().to_string().as_str());
            r.pass("module.loaded", "spec-file plumbing");
            r
        }
    }
}

/// The dual-numbers algebra `ℚ[x]/(x²)` spec, shipped as the running
/// example (`data/dualnumbers.toml` mirrors this string).
pub const DUAL_NUMBERS_TOML: &str = r#"
kind = "algebra"
id = "dualnumbers"
field = "Q"
operad = "com"
basis = ["1", "x"]
unit = "1"

[[table]]
args = ["1", "1"]
value = { 1 = "1" }

[[table]]
args = ["1", "x"]
value = { x = "1" }

[[table]]
args = ["x", "x"]
value = {}
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::derivation_space;
    use crate::scalar::Scalar;

    #[test]
    fn dual_numbers_load_and_derive() {
        let a = parse_spec_str(DUAL_NUMBERS_TOML, true)
            .unwrap()
            .into_algebra()
            .unwrap();
        assert_eq!(a.carrier.dim(), 2);
        assert!(check_algebra_axioms(&a, 3).all_passed());
        let ders = derivation_space(&a);
        assert_eq!(ders.len(), 1);
        // The basis derivation is D(x) = x (up to normalization).
        assert_eq!(ders[0].column("x"), a.carrier.gen("x"));
        assert!(ders[0].column("1").is_zero());
    }

    #[test]
    fn non_associative_table_gated_and_overridable() {
        // x·x = 1 over {1, x} with 1 acting as unit is not associative
        // ((x·x)·x = x but the Com axiom checker also needs equivariance —
        // pick a genuinely broken table: x·x = x, 1·x = 0).
        let text = r#"
kind = "algebra"
operad = "com"
basis = ["1", "x"]
unit = "1"

[[table]]
args = ["1", "1"]
value = { 1 = "1" }

[[table]]
args = ["1", "x"]
value = {}

[[table]]
args = ["x", "x"]
value = { x = "1" }
"#;
        match parse_spec_str(text, true) {
            Err(SpecError::Math(_)) => {}
            other => panic!("expected a math violation, got {:?}", other.is_ok()),
        }
        // --no-verify loads the same file, and the suites then fail.
        let obj = parse_spec_str(text, false).unwrap();
        assert!(!verify_object(&obj).all_passed());
    }

    #[test]
    fn empty_basis_is_zero_algebra() {
        let text = r#"
kind = "algebra"
operad = "com"
basis = []
"#;
        let a = parse_spec_str(text, true).unwrap().into_algebra().unwrap();
        assert_eq!(a.carrier.dim(), 0);
        let mu = crate::operad::OperadElement::basis(0, "c0", a.operad.tag);
        assert!(a.evaluate(&mu, &[]).is_zero());
    }

    #[test]
    fn lie_bracket_completion_and_gate() {
        let text = r#"
kind = "algebra"
id = "he"
operad = "lie"
basis = ["h", "e"]

[[table]]
args = ["h", "e"]
value = { e = "2" }
"#;
        let a = parse_spec_str(text, true).unwrap().into_algebra().unwrap();
        let mu = crate::operad::OperadElement::basis(2, "l1.2", a.operad.tag);
        let he = a.evaluate(&mu, &[a.carrier.gen("h"), a.carrier.gen("e")]);
        let eh = a.evaluate(&mu, &[a.carrier.gen("e"), a.carrier.gen("h")]);
        assert_eq!(he, a.carrier.gen("e").scale(&Scalar::from_int(2, a.operad.tag)));
        assert_eq!(eh, he.neg());
        // A nonzero diagonal bracket is a verified violation.
        let bad = r#"
kind = "algebra"
operad = "lie"
basis = ["h"]

[[table]]
args = ["h", "h"]
value = { h = "1" }
"#;
        assert!(matches!(parse_spec_str(bad, true), Err(SpecError::Math(_))));
    }

    #[test]
    fn pointed_module_spec() {
        let text = r#"
kind = "algebra"
id = "dual-module"
operad = "pointed"
basis = ["u", "v"]

[pointed]
basis = ["1", "t"]
unit = "1"

[[pointed.table]]
args = ["1", "1"]
value = { 1 = "1" }

[[pointed.table]]
args = ["1", "t"]
value = { t = "1" }

[[pointed.table]]
args = ["t", "1"]
value = { t = "1" }

[[pointed.table]]
args = ["t", "t"]
value = {}

[[table]]
op = "1"
args = ["u"]
value = { u = "1" }

[[table]]
op = "1"
args = ["v"]
value = { v = "1" }

[[table]]
op = "t"
args = ["u"]
value = { v = "1" }

[[table]]
op = "t"
args = ["v"]
value = {}
"#;
        let a = parse_spec_str(text, true).unwrap().into_algebra().unwrap();
        assert!(a.operad.is_pointed());
        assert!(check_algebra_axioms(&a, 3).all_passed());
    }

    #[test]
    fn schema_errors_are_schema_errors() {
        for text in [
            "kind = \"nope\"",
            "kind = \"algebra\"\noperad = \"com\"",
            "kind = \"algebra\"\noperad = \"com\"\nbasis = [\"x\"]\n[[table]]\nargs = [\"y\", \"x\"]\nvalue = {}",
            "kind = \"algebra\"\noperad = \"com\"\nbasis = [\"x\"]\n[[table]]\nargs = [\"x\", \"x\"]\nvalue = { x = \"1/0\" }",
            "kind = \"algebra\"\noperad = \"zorp\"\nbasis = []",
        ] {
            assert!(
                matches!(parse_spec_str(text, true), Err(SpecError::Schema(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn table_operad_round_trip() {
        // Com truncated at arity 2 as an explicit table.
        let text = r#"
kind = "operad-table"
id = "com2"
unit = "e1"

[[component]]
arity = 0
basis = ["e0"]

[[component]]
arity = 1
basis = ["e1"]

[[component]]
arity = 2
basis = ["e2"]

[[compose]]
arity = 1
op = "e1"
slot = 1
with = "e1"
value = { e1 = "1" }

[[compose]]
arity = 1
op = "e1"
slot = 1
with = "e0"
value = { e0 = "1" }

[[compose]]
arity = 1
op = "e1"
slot = 1
with = "e2"
value = { e2 = "1" }

[[compose]]
arity = 2
op = "e2"
slot = 1
with = "e1"
value = { e2 = "1" }

[[compose]]
arity = 2
op = "e2"
slot = 2
with = "e1"
value = { e2 = "1" }

[[compose]]
arity = 2
op = "e2"
slot = 1
with = "e0"
value = { e1 = "1" }

[[compose]]
arity = 2
op = "e2"
slot = 2
with = "e0"
value = { e1 = "1" }

[[action]]
arity = 2
op = "e2"
perm = [2, 1]
value = { e2 = "1" }
"#;
        let op = parse_spec_str(text, true).unwrap().into_operad().unwrap();
        assert_eq!(op.max_arity, 2);
        assert!(check_operad_axioms(&op, 2).all_passed());
        // A mutated composition entry is a verified violation…
        let broken = text.replace(
            "slot = 2\nwith = \"e0\"\nvalue = { e1 = \"1\" }",
            "slot = 2\nwith = \"e0\"\nvalue = { e1 = \"-1\" }",
        );
        assert!(matches!(
            parse_spec_str(&broken, true),
            Err(SpecError::Math(_))
        ));
        // …that --no-verify loads anyway, failing the suites later.
        let obj = parse_spec_str(&broken, false).unwrap();
        assert!(!verify_object(&obj).all_passed());
    }
}
