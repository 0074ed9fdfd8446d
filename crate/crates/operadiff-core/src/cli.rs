//! The `operadiff` command-line surface.
//!
//! Every subcommand prints a human-readable report (or `--json`) and exits
//! with `0` when all checks pass or the computation succeeds, `1` on a
//! verified mathematical violation (with a counterexample), and `2` on an
//! input or usage error.  All randomized suites take `--seed` with a fixed
//! default, and identical seeds produce byte-identical reports.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use crate::adjoint::{check_adjoint_tangent, check_adjunction, kahler_truncated};
use crate::algebra::{
    check_algebra_axioms, check_differential_object_alg, check_tangent_equations,
    check_tangent_lift, derivation_space, standard_endomorphisms, PAlgebra,
};
use crate::expr::{parse_element, render, VarTable};
use crate::free::{
    check_dc_axioms, check_lambda_axioms, check_monad_laws, diff_transform,
};
use crate::linalg::{BasedModule, Vector};
use crate::operad::{
    check_operad_axioms, make_ass, make_com, make_lie, make_pointed_operad, AssocAlgebra, Operad,
};
use crate::ppoly::check_cdc_properties;
use crate::report::Report;
use crate::scalar::FieldTag;
use crate::specfile::{parse_spec, SpecError, SpecObject};

pub const DEFAULT_SEED: u64 = 2024;

#[derive(Parser)]
#[command(name = "operadiff", version, about = "Exact operadic differentiation engine")]
struct Cli {
    /// Emit the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized parts of the suites.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Skip the construction-time axiom gate on spec files.
    #[arg(long, global = true)]
    no_verify: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply the differential combinator to an expression.
    Differentiate {
        #[arg(long)]
        operad: String,
        /// Comma-separated variable names.
        #[arg(long, default_value = "x,y,z")]
        vars: String,
        expr: String,
    },
    /// Substitute one single-variable expression into another.
    Compose {
        #[arg(long)]
        operad: String,
        /// Outer expression in the variable `y`.
        outer: String,
        /// Inner expression in the variable `x`.
        inner: String,
    },
    /// Operad axiom suite (built-in flavor or table spec file).
    CheckOperad {
        #[arg(long)]
        operad: Option<String>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        arity: usize,
    },
    /// Differential-combinator axioms [DC.1]–[DC.6] and [DC.N].
    CheckDc {
        #[arg(long)]
        operad: String,
        #[arg(long, default_value_t = 4)]
        arity: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value = "x,y")]
        vars: String,
    },
    /// Tangent-monad distributive law, ∂/λ round trip, and monad laws.
    CheckLambda {
        #[arg(long)]
        operad: String,
        #[arg(long, default_value_t = 4)]
        arity: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value = "x,y")]
        vars: String,
    },
    /// Algebra axiom suite for a spec file.
    CheckAlgebra {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// The semidirect tangent bundle of an algebra and its lift check.
    Tangent {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// The tangent-category equation suite.
    TangentCheck {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Solve for the derivation Lie algebra of an algebra.
    Derivations {
        #[arg(long)]
        algebra: PathBuf,
    },
    /// Differential-object criteria for an algebra or a free algebra.
    DiffObject {
        #[arg(long)]
        algebra: Option<PathBuf>,
        #[arg(long)]
        operad: Option<String>,
        #[arg(long, default_value = "x")]
        vars: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Kähler differentials: the d-degree-1 cell of T°(A).
    Kahler {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 4)]
        weight_bound: usize,
    },
    /// Adjoint tangent-structure maps and the dual tangent equations.
    AdjointTangent {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 3)]
        weight_bound: usize,
    },
    /// Unit, counit, triangle identity, and transposition round trips.
    CheckAdjunction {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 3)]
        weight_bound: usize,
    },
    /// Cartesian-differential-category properties of P-POLY.
    CheckCdc {
        #[arg(long)]
        operad: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn flavor(name: &str) -> Result<Operad, String> {
    match name {
        "com" => Ok(make_com(FieldTag::Q)),
        "ass" => Ok(make_ass(FieldTag::Q)),
        "lie" => Ok(make_lie(FieldTag::Q)),
        "pointed" | "dual" => Ok(make_pointed_operad(AssocAlgebra::dual_numbers(FieldTag::Q))),
        other => Err(format!(
            "unknown operad {other:?} (expected com | ass | lie | pointed)"
        )),
    }
}

fn split_vars(vars: &str) -> Vec<String> {
    vars.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn fmt_vector(v: &Vector) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (s, c) in v.iter() {
        let negative = c.is_negative();
        let abs = if negative { -c } else { c.clone() };
        if first {
            if negative {
                out.push('-');
            }
            first = false;
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if abs.is_one() {
            out.push_str(s);
        } else {
            out.push_str(&format!("{abs}*{s}"));
        }
    }
    out
}

fn load_algebra(path: &std::path::Path, verify: bool) -> Result<PAlgebra, (i32, String)> {
    match parse_spec(path, verify).and_then(SpecObject::into_algebra) {
        Ok(a) => Ok(a),
        Err(e @ SpecError::Schema(_)) => Err((2, format!("{e}\n"))),
        Err(e @ SpecError::Math(_)) => Err((1, format!("{e}\n"))),
    }
}

fn emit(report: &Report, json: bool) -> (i32, String) {
    let code = if report.all_passed() { 0 } else { 1 };
    let out = if json {
        format!("{}\n", report.render_json())
    } else {
        report.render_text()
    };
    (code, out)
}

/// Runs the CLI on the given arguments, returning `(exit code, stdout)`.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap renders --help/--version as "errors" with success status.
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    match run_command(cli) {
        Ok(r) => r,
        Err((code, msg)) => (code, msg),
    }
}

fn run_command(cli: Cli) -> Result<(i32, String), (i32, String)> {
    let verify = !cli.no_verify;
    let json = cli.json;
    let seed = cli.seed;
    Ok(match cli.cmd {
        Cmd::Differentiate { operad, vars, expr } => {
            let op = flavor(&operad).map_err(|m| (2, format!("{m}\n")))?;
            let names = split_vars(&vars);
            let plain = VarTable::plain(&names);
            let tangent = VarTable::tangent(&names);
            let e = parse_element(&op, &plain, &expr).map_err(|e| (2, format!("{e}\n")))?;
            let d = diff_transform(&op, &e);
            (0, format!("{}\n", render(&op, &tangent, &d)))
        }
        Cmd::Compose { operad, outer, inner } => {
            let op = flavor(&operad).map_err(|m| (2, format!("{m}\n")))?;
            let vx = VarTable::plain(&["x"]);
            let vy = VarTable::plain(&["y"]);
            let f = parse_element(&op, &vx, &inner).map_err(|e| (2, format!("{e}\n")))?;
            let g = parse_element(&op, &vy, &outer).map_err(|e| (2, format!("{e}\n")))?;
            let composed = crate::free::bind(&op, &g, &|_| f.clone());
            (0, format!("{}\n", render(&op, &vx, &composed)))
        }
        Cmd::CheckOperad { operad, spec, arity } => {
            let op: Arc<Operad> = match (operad, spec) {
                (Some(name), None) => Arc::new(flavor(&name).map_err(|m| (2, format!("{m}\n")))?),
                (None, Some(path)) => match parse_spec(&path, verify) {
                    Ok(obj) => obj.into_operad().map_err(|e| (2, format!("{e}\n")))?,
                    Err(e @ SpecError::Schema(_)) => return Err((2, format!("{e}\n"))),
                    Err(e @ SpecError::Math(_)) => return Err((1, format!("{e}\n"))),
                },
                _ => return Err((2, "pass exactly one of --operad or --spec\n".to_string())),
            };
            let rep = check_operad_axioms(&op, arity.min(op.max_arity));
            emit(&rep, json)
        }
        Cmd::CheckDc {
            operad,
            arity,
            trials,
            vars,
        } => {
            let op = flavor(&operad).map_err(|m| (2, format!("{m}\n")))?;
            let module = BasedModule::new(split_vars(&vars), op.tag);
            let rep = check_dc_axioms(&op, &module, arity, trials, seed);
            emit(&rep, json)
        }
        Cmd::CheckLambda {
            operad,
            arity,
            trials,
            vars,
        } => {
            let op = flavor(&operad).map_err(|m| (2, format!("{m}\n")))?;
            let module = BasedModule::new(split_vars(&vars), op.tag);
            let mut rep = check_lambda_axioms(&op, &module, arity, trials, seed);
            rep.absorb("monad.", check_monad_laws(&op, &module, arity, trials, seed));
            emit(&rep, json)
        }
        Cmd::CheckAlgebra { algebra, bound } => {
            let a = load_algebra(&algebra, false)?;
            let rep = check_algebra_axioms(&a, bound);
            emit(&rep, json)
        }
        Cmd::Tangent { algebra, bound } => {
            let a = load_algebra(&algebra, verify)?;
            let t = a.tangent_bundle();
            let mut out = format!(
                "T({}) carrier: [{}] (dim {})\n",
                a.id,
                t.carrier.basis().join(", "),
                t.carrier.dim()
            );
            let rep = check_tangent_lift(&a, bound);
            let (code, body) = emit(&rep, json);
            if json {
                out = body;
            } else {
                out.push_str(&body);
            }
            (code, out)
        }
        Cmd::TangentCheck { algebra, bound } => {
            let a = load_algebra(&algebra, verify)?;
            let morphisms = standard_endomorphisms(&a);
            let rep = check_tangent_equations(&a, &morphisms, bound);
            emit(&rep, json)
        }
        Cmd::Derivations { algebra } => {
            let a = load_algebra(&algebra, verify)?;
            let ders = derivation_space(&a);
            let mut line = format!("dim Der = {}", ders.len());
            if !ders.is_empty() {
                let basis: Vec<String> = ders
                    .iter()
                    .map(|d| {
                        a.carrier
                            .basis()
                            .iter()
                            .filter(|s| !d.column(s).is_zero())
                            .map(|s| format!("D({s})={}", fmt_vector(&d.column(s))))
                            .collect::<Vec<_>>()
                            .join(", ")
                    })
                    .collect();
                line.push_str(&format!("; basis: {}", basis.join("; ")));
            }
            (0, format!("{line}\n"))
        }
        Cmd::DiffObject {
            algebra,
            operad,
            vars,
            bound,
        } => match (algebra, operad) {
            (Some(path), None) => {
                let a = load_algebra(&path, verify)?;
                let rep = check_differential_object_alg(&a, bound);
                emit(&rep, json)
            }
            (None, Some(name)) => {
                let op = Arc::new(flavor(&name).map_err(|m| (2, format!("{m}\n")))?);
                let module = BasedModule::new(split_vars(&vars), op.tag);
                let rep = crate::adjoint::check_free_differential_object(&op, &module, bound);
                emit(&rep, json)
            }
            _ => return Err((2, "pass exactly one of --algebra or --operad\n".to_string())),
        },
        Cmd::Kahler {
            algebra,
            weight_bound,
        } => {
            let a = load_algebra(&algebra, verify)?;
            let pres = kahler_truncated(&a, weight_bound);
            let cell = pres.cells.get(&vec![1]);
            let classes: Vec<String> = cell
                .map(|c| {
                    c.class_symbols()
                        .iter()
                        .map(|s| {
                            let t = crate::free::term_from_symbol(s);
                            format!("{}({})", t.op, t.word.join(","))
                        })
                        .collect()
                })
                .unwrap_or_default();
            let mut out = format!("dim Ω_{} = {}\n", a.id, pres.dim(&[1]));
            if !classes.is_empty() {
                out.push_str(&format!("classes: {}\n", classes.join(", ")));
            }
            (0, out)
        }
        Cmd::AdjointTangent {
            algebra,
            weight_bound,
        } => {
            let a = load_algebra(&algebra, verify)?;
            let rep = check_adjoint_tangent(&a, weight_bound, seed);
            emit(&rep, json)
        }
        Cmd::CheckAdjunction {
            algebra,
            weight_bound,
        } => {
            let a = load_algebra(&algebra, verify)?;
            let rep = check_adjunction(&a, weight_bound, seed);
            emit(&rep, json)
        }
        Cmd::CheckCdc { operad, trials } => {
            let op = flavor(&operad).map_err(|m| (2, format!("{m}\n")))?;
            let rep = check_cdc_properties(&op, trials, seed);
            emit(&rep, json)
        }
    })
}
