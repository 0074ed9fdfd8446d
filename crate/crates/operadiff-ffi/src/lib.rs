//! C ABI for the operadiff engine.
//!
//! All functions are panic-safe at the boundary and return an
//! [`OperadiffStatus`] code.  Objects cross the boundary only as opaque
//! handles; every `*_new`/`*_load` has a matching `*_free`, and strings
//! returned through `char **` out-parameters must be released with
//! [`operadiff_string_free`].  On any non-OK status the thread-local
//! message retrieved by [`operadiff_last_error`] describes the failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;

use operadiff::algebra::{check_algebra_axioms, derivation_space, PAlgebra};
use operadiff::expr::{parse_element, render, VarTable};
use operadiff::free::{check_dc_axioms, diff_transform};
use operadiff::linalg::BasedModule;
use operadiff::operad::{make_ass, make_com, make_lie, make_pointed_operad, AssocAlgebra, Operad};
use operadiff::report::Report;
use operadiff::scalar::FieldTag;
use operadiff::specfile::{parse_spec, SpecError, SpecObject};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperadiffStatus {
    /// Success.
    Ok = 0,
    /// A verified mathematical violation (a failed check or axiom gate).
    MathViolation = 1,
    /// Malformed input: unknown operad name, parse error, bad spec file.
    UsageError = 2,
    /// A required pointer argument was null.
    NullPointer = 3,
    /// An internal invariant failed (a panic was caught at the boundary).
    Internal = 4,
}

/// Opaque handle to an operad.
pub struct OperadiffOperad(Arc<Operad>);
/// Opaque handle to an algebra over an operad.
pub struct OperadiffAlgebra(PAlgebra);
/// Opaque handle to a verification report.
pub struct OperadiffReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// The message for the most recent non-OK status on this thread.  The
/// pointer is valid until the next failing call on the same thread; never
/// free it.
#[no_mangle]
pub extern "C" fn operadiff_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

fn guard<F: FnOnce() -> OperadiffStatus>(f: F) -> OperadiffStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".to_string());
            set_error(&msg);
            OperadiffStatus::Internal
        }
    }
}

/// # Safety
/// `p` must be a valid NUL-terminated string or null.
unsafe fn read_str<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        return None;
    }
    CStr::from_ptr(p).to_str().ok()
}

fn write_string(out: *mut *mut c_char, s: String) -> OperadiffStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            OperadiffStatus::Ok
        }
        Err(_) => {
            set_error("result contained an interior NUL byte");
            OperadiffStatus::Internal
        }
    }
}

fn builtin_operad(name: &str) -> Result<Operad, String> {
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

fn vars_of(csv: &str) -> Vec<String> {
    csv.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Creates a built-in operad over ℚ: `"com"`, `"ass"`, `"lie"`, or
/// `"pointed"` (the pointed operad of the dual numbers).
///
/// # Safety
/// `name` must be a valid NUL-terminated string; `out` must be non-null.
#[no_mangle]
pub unsafe extern "C" fn operadiff_operad_new(
    name: *const c_char,
    out: *mut *mut OperadiffOperad,
) -> OperadiffStatus {
    guard(|| {
        if out.is_null() {
            set_error("out pointer is null");
            return OperadiffStatus::NullPointer;
        }
        let Some(name) = read_str(name) else {
            set_error("name is null or not UTF-8");
            return OperadiffStatus::NullPointer;
        };
        match builtin_operad(name) {
            Ok(op) => {
                *out = Box::into_raw(Box::new(OperadiffOperad(Arc::new(op))));
                OperadiffStatus::Ok
            }
            Err(m) => {
                set_error(&m);
                OperadiffStatus::UsageError
            }
        }
    })
}

/// Releases an operad handle.  Passing null is a no-op.
///
/// # Safety
/// `op` must have come from `operadiff_operad_new` and not been freed.
#[no_mangle]
pub unsafe extern "C" fn operadiff_operad_free(op: *mut OperadiffOperad) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Loads an algebra (or rejects an operad spec) from a TOML spec file.
/// With `verify` nonzero the construction-time axiom gate runs and a
/// violated axiom yields `MathViolation`.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be non-null.
#[no_mangle]
pub unsafe extern "C" fn operadiff_algebra_load(
    path: *const c_char,
    verify: i32,
    out: *mut *mut OperadiffAlgebra,
) -> OperadiffStatus {
    guard(|| {
        if out.is_null() {
            set_error("out pointer is null");
            return OperadiffStatus::NullPointer;
        }
        let Some(path) = read_str(path) else {
            set_error("path is null or not UTF-8");
            return OperadiffStatus::NullPointer;
        };
        match parse_spec(&PathBuf::from(path), verify != 0).and_then(SpecObject::into_algebra) {
            Ok(a) => {
                *out = Box::into_raw(Box::new(OperadiffAlgebra(a)));
                OperadiffStatus::Ok
            }
            Err(SpecError::Schema(m)) => {
                set_error(&m);
                OperadiffStatus::UsageError
            }
            Err(SpecError::Math(m)) => {
                set_error(&m);
                OperadiffStatus::MathViolation
            }
        }
    })
}

/// Releases an algebra handle.  Passing null is a no-op.
///
/// # Safety
/// `a` must have come from `operadiff_algebra_load` and not been freed.
#[no_mangle]
pub unsafe extern "C" fn operadiff_algebra_free(a: *mut OperadiffAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Applies the differential combinator to `expr` over the comma-separated
/// variables `vars` and writes the rendered result (e.g. `"2*x*dx"`).
///
/// # Safety
/// `op` must be a live operad handle; `vars`, `expr` valid strings; `out`
/// non-null.  The result must be freed with `operadiff_string_free`.
#[no_mangle]
pub unsafe extern "C" fn operadiff_differentiate(
    op: *const OperadiffOperad,
    vars: *const c_char,
    expr: *const c_char,
    out: *mut *mut c_char,
) -> OperadiffStatus {
    guard(|| {
        if op.is_null() || out.is_null() {
            set_error("operad or out pointer is null");
            return OperadiffStatus::NullPointer;
        }
        let (Some(vars), Some(expr)) = (read_str(vars), read_str(expr)) else {
            set_error("vars or expr is null or not UTF-8");
            return OperadiffStatus::NullPointer;
        };
        let op = &(*op).0;
        let names = vars_of(vars);
        let parsed = match parse_element(op, &VarTable::plain(&names), expr) {
            Ok(e) => e,
            Err(e) => {
                set_error(&e.to_string());
                return OperadiffStatus::UsageError;
            }
        };
        let d = diff_transform(op, &parsed);
        write_string(out, render(op, &VarTable::tangent(&names), &d))
    })
}

/// Frees a string returned through a `char **` out-parameter.
///
/// # Safety
/// `s` must have come from this library and not been freed.
#[no_mangle]
pub unsafe extern "C" fn operadiff_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs the differential-combinator axiom suite over the given variables.
///
/// # Safety
/// `op` must be a live operad handle; `vars` a valid string; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn operadiff_check_dc(
    op: *const OperadiffOperad,
    vars: *const c_char,
    arity_bound: usize,
    trials: usize,
    seed: u64,
    out: *mut *mut OperadiffReport,
) -> OperadiffStatus {
    guard(|| {
        if op.is_null() || out.is_null() {
            set_error("operad or out pointer is null");
            return OperadiffStatus::NullPointer;
        }
        let Some(vars) = read_str(vars) else {
            set_error("vars is null or not UTF-8");
            return OperadiffStatus::NullPointer;
        };
        let op = &(*op).0;
        let module = BasedModule::new(vars_of(vars), op.tag);
        let rep = check_dc_axioms(op, &module, arity_bound, trials, seed);
        *out = Box::into_raw(Box::new(OperadiffReport(rep)));
        OperadiffStatus::Ok
    })
}

/// Runs the algebra axiom suite up to the given arity bound.
///
/// # Safety
/// `a` must be a live algebra handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn operadiff_check_algebra(
    a: *const OperadiffAlgebra,
    bound: usize,
    out: *mut *mut OperadiffReport,
) -> OperadiffStatus {
    guard(|| {
        if a.is_null() || out.is_null() {
            set_error("algebra or out pointer is null");
            return OperadiffStatus::NullPointer;
        }
        let rep = check_algebra_axioms(&(*a).0, bound);
        *out = Box::into_raw(Box::new(OperadiffReport(rep)));
        OperadiffStatus::Ok
    })
}

/// Runs the adjoint tangent-structure suite at the given weight bound.
///
/// # Safety
/// `a` must be a live algebra handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn operadiff_check_adjoint_tangent(
    a: *const OperadiffAlgebra,
    weight_bound: usize,
    seed: u64,
    out: *mut *mut OperadiffReport,
) -> OperadiffStatus {
    guard(|| {
        if a.is_null() || out.is_null() {
            set_error("algebra or out pointer is null");
            return OperadiffStatus::NullPointer;
        }
        let rep = operadiff::adjoint::check_adjoint_tangent(&(*a).0, weight_bound, seed);
        *out = Box::into_raw(Box::new(OperadiffReport(rep)));
        OperadiffStatus::Ok
    })
}

/// Writes the dimension of the derivation Lie algebra of `a`.
///
/// # Safety
/// `a` must be a live algebra handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn operadiff_derivation_count(
    a: *const OperadiffAlgebra,
    out: *mut usize,
) -> OperadiffStatus {
    guard(|| {
        if a.is_null() || out.is_null() {
            set_error("algebra or out pointer is null");
            return OperadiffStatus::NullPointer;
        }
        *out = derivation_space(&(*a).0).len();
        OperadiffStatus::Ok
    })
}

/// Returns 1 when every check in the report passed, 0 otherwise (including
/// for a null handle).
///
/// # Safety
/// `r` must be a live report handle or null.
#[no_mangle]
pub unsafe extern "C" fn operadiff_report_passed(r: *const OperadiffReport) -> i32 {
    if r.is_null() {
        return 0;
    }
    i32::from((*r).0.all_passed())
}

/// Renders a report as text (`as_json` = 0) or JSON (`as_json` != 0).
///
/// # Safety
/// `r` must be a live report handle; `out` non-null.  The result must be
/// freed with `operadiff_string_free`.
#[no_mangle]
pub unsafe extern "C" fn operadiff_report_render(
    r: *const OperadiffReport,
    as_json: i32,
    out: *mut *mut c_char,
) -> OperadiffStatus {
    guard(|| {
        if r.is_null() || out.is_null() {
            set_error("report or out pointer is null");
            return OperadiffStatus::NullPointer;
        }
        let rep = &(*r).0;
        let text = if as_json != 0 {
            rep.render_json()
        } else {
            rep.render_text()
        };
        write_string(out, text)
    })
}

/// Releases a report handle.  Passing null is a no-op.
///
/// # Safety
/// `r` must have come from this library and not been freed.
#[no_mangle]
pub unsafe extern "C" fn operadiff_report_free(r: *mut OperadiffReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// The crate version as a static string; never free it.
#[no_mangle]
pub extern "C" fn operadiff_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    unsafe fn take_string(p: *mut c_char) -> String {
        let s = CStr::from_ptr(p).to_str().unwrap().to_string();
        operadiff_string_free(p);
        s
    }

    #[test]
    fn differentiate_roundtrip() {
        unsafe {
            let name = CString::new("com").unwrap();
            let mut op: *mut OperadiffOperad = ptr::null_mut();
            assert_eq!(operadiff_operad_new(name.as_ptr(), &mut op), OperadiffStatus::Ok);
            let vars = CString::new("x,y,z").unwrap();
            let expr = CString::new("x^2").unwrap();
            let mut out: *mut c_char = ptr::null_mut();
            assert_eq!(
                operadiff_differentiate(op, vars.as_ptr(), expr.as_ptr(), &mut out),
                OperadiffStatus::Ok
            );
            assert_eq!(take_string(out), "2*x*dx");
            operadiff_operad_free(op);
        }
    }

    #[test]
    fn unknown_operad_sets_error() {
        unsafe {
            let name = CString::new("nope").unwrap();
            let mut op: *mut OperadiffOperad = ptr::null_mut();
            assert_eq!(
                operadiff_operad_new(name.as_ptr(), &mut op),
                OperadiffStatus::UsageError
            );
            let msg = CStr::from_ptr(operadiff_last_error()).to_str().unwrap();
            assert!(msg.contains("nope"));
        }
    }

    #[test]
    fn algebra_load_check_and_derivations() {
        unsafe {
            let dir = std::env::temp_dir().join("operadiff_ffi_test");
            std::fs::create_dir_all(&dir).unwrap();
            let path = dir.join("dualnumbers.toml");
            std::fs::write(&path, operadiff::specfile::DUAL_NUMBERS_TOML).unwrap();
            let cpath = CString::new(path.to_str().unwrap()).unwrap();
            let mut a: *mut OperadiffAlgebra = ptr::null_mut();
            assert_eq!(
                operadiff_algebra_load(cpath.as_ptr(), 1, &mut a),
                OperadiffStatus::Ok
            );
            let mut n = usize::MAX;
            assert_eq!(operadiff_derivation_count(a, &mut n), OperadiffStatus::Ok);
            assert_eq!(n, 1);
            let mut rep: *mut OperadiffReport = ptr::null_mut();
            assert_eq!(operadiff_check_algebra(a, 3, &mut rep), OperadiffStatus::Ok);
            assert_eq!(operadiff_report_passed(rep), 1);
            let mut text: *mut c_char = ptr::null_mut();
            assert_eq!(operadiff_report_render(rep, 0, &mut text), OperadiffStatus::Ok);
            assert!(take_string(text).contains("checks passed"));
            operadiff_report_free(rep);
            operadiff_algebra_free(a);
        }
    }

    #[test]
    fn dc_suite_via_ffi() {
        unsafe {
            let name = CString::new("lie").unwrap();
            let mut op: *mut OperadiffOperad = ptr::null_mut();
            assert_eq!(operadiff_operad_new(name.as_ptr(), &mut op), OperadiffStatus::Ok);
            let vars = CString::new("x,y").unwrap();
            let mut rep: *mut OperadiffReport = ptr::null_mut();
            assert_eq!(
                operadiff_check_dc(op, vars.as_ptr(), 3, 25, 7, &mut rep),
                OperadiffStatus::Ok
            );
            assert_eq!(operadiff_report_passed(rep), 1);
            let mut json: *mut c_char = ptr::null_mut();
            assert_eq!(operadiff_report_render(rep, 1, &mut json), OperadiffStatus::Ok);
            let v: &str = &take_string(json);
            assert!(v.contains("\"command\": \"check-dc\""));
            operadiff_report_free(rep);
            operadiff_operad_free(op);
        }
    }

    #[test]
    fn null_handling() {
        unsafe {
            let mut out: *mut c_char = ptr::null_mut();
            assert_eq!(
                operadiff_differentiate(ptr::null(), ptr::null(), ptr::null(), &mut out),
                OperadiffStatus::NullPointer
            );
            assert_eq!(operadiff_report_passed(ptr::null()), 0);
            operadiff_operad_free(ptr::null_mut());
            operadiff_algebra_free(ptr::null_mut());
            operadiff_report_free(ptr::null_mut());
        }
    }
}
