//! C ABI over `logode`.
//!
//! Handles are opaque and owned by the caller: every `*_parse` or
//! `*_solve_*` that returns `LOGODE_STATUS_OK` hands out a pointer that must
//! be released with the matching `*_free`. Every function returns a
//! [`LogodeStatus`]; on failure a one-line description is available from
//! [`logode_last_error`] on the same thread until the next call.
//!
//! Solution handles are safe to evaluate from several threads at once.
//! `logode_solution_scan_validity` mutates its handle and needs exclusive
//! access.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use logode::verify::{self, VerifyConfig};
use logode::{
    ClosedFormSolution, EquationSpec, Expression, InitialCondition, Interval, QuadError, QuadratureConfig,
    SolveError, VerifyError,
};

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogodeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    DomainError = 4,
    ConvergenceError = 5,
    OutsideValidity = 6,
    VerificationFailed = 7,
    Panic = 8,
}

/// Parsed coefficient expression.
pub struct LogodeExpr {
    inner: Expression,
}

/// Closed-form solution together with the problem it solves.
pub struct LogodeSolution {
    spec: EquationSpec,
    ic: InitialCondition,
    sol: ClosedFormSolution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: LogodeStatus, msg: impl Into<String>) -> LogodeStatus {
    set_error(msg.into());
    status
}

fn solve_status(e: &SolveError) -> LogodeStatus {
    match e {
        SolveError::InvalidParameter(_) => LogodeStatus::InvalidArgument,
        SolveError::OutsideValidity { .. } => LogodeStatus::OutsideValidity,
        SolveError::Quad(QuadError::Convergence { .. }) => LogodeStatus::ConvergenceError,
        SolveError::Quad(QuadError::Config(_)) => LogodeStatus::InvalidArgument,
        _ => LogodeStatus::DomainError,
    }
}

fn verify_status(e: &VerifyError) -> LogodeStatus {
    match e {
        VerifyError::Solve { source, .. } => solve_status(source),
        VerifyError::Invalid(_) | VerifyError::TooSmall { .. } => LogodeStatus::InvalidArgument,
        _ => LogodeStatus::DomainError,
    }
}

/// Run `body`, converting panics into `LOGODE_STATUS_PANIC`.
fn guarded(body: impl FnOnce() -> LogodeStatus) -> LogodeStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(LogodeStatus::Panic, "internal panic"),
    }
}

/// Message describing the last failure on this thread, or NULL if the last
/// call succeeded. Owned by the library; valid until the next call.
#[no_mangle]
pub extern "C" fn logode_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse `text` into a new expression handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn logode_expr_parse(text: *const c_char, out: *mut *mut LogodeExpr) -> LogodeStatus {
    guarded(|| {
        if text.is_null() || out.is_null() {
            return fail(LogodeStatus::NullPointer, "null argument");
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(LogodeStatus::ParseError, "expression is not valid UTF-8");
        };
        match Expression::parse(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(LogodeExpr { inner }));
                LogodeStatus::Ok
            }
            Err(e) => fail(LogodeStatus::ParseError, e.to_string()),
        }
    })
}

/// Evaluate an expression at `x`.
///
/// # Safety
/// `expr` must come from `logode_expr_parse`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn logode_expr_eval(expr: *const LogodeExpr, x: f64, out: *mut f64) -> LogodeStatus {
    guarded(|| {
        if expr.is_null() || out.is_null() {
            return fail(LogodeStatus::NullPointer, "null argument");
        }
        match (*expr).inner.eval(x) {
            Ok(v) => {
                *out = v;
                LogodeStatus::Ok
            }
            Err(e) => fail(LogodeStatus::DomainError, e.to_string()),
        }
    })
}

/// Release an expression handle. NULL is ignored.
///
/// # Safety
/// `expr` must come from `logode_expr_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn logode_expr_free(expr: *mut LogodeExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

unsafe fn finish_solve(
    spec: EquationSpec,
    ic: InitialCondition,
    out: *mut *mut LogodeSolution,
) -> LogodeStatus {
    match spec.solve(&ic, &QuadratureConfig::default()) {
        Ok(sol) => {
            *out = Box::into_raw(Box::new(LogodeSolution { spec, ic, sol }));
            LogodeStatus::Ok
        }
        Err(e) => fail(solve_status(&e), e.to_string()),
    }
}

unsafe fn first_order(
    f: *const LogodeExpr,
    g: *const LogodeExpr,
    out: *mut *mut LogodeSolution,
    make: impl FnOnce(Expression, Expression) -> EquationSpec,
    x0: f64,
    y0: f64,
) -> LogodeStatus {
    guarded(|| {
        if f.is_null() || g.is_null() || out.is_null() {
            return fail(LogodeStatus::NullPointer, "null argument");
        }
        let spec = make((*f).inner.clone(), (*g).inner.clone());
        finish_solve(spec, InitialCondition::new(x0, y0), out)
    })
}

/// Solve `y' + f y = g`, `y(x0) = y0`.
///
/// # Safety
/// `f`, `g` must be live expression handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn logode_solve_linear(
    f: *const LogodeExpr,
    g: *const LogodeExpr,
    x0: f64,
    y0: f64,
    out: *mut *mut LogodeSolution,
) -> LogodeStatus {
    first_order(f, g, out, |f, g| EquationSpec::Linear { f, g }, x0, y0)
}

/// Solve `y' + f y = g y^alpha`, `y(x0) = y0`.
///
/// # Safety
/// `f`, `g` must be live expression handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn logode_solve_bernoulli(
    f: *const LogodeExpr,
    g: *const LogodeExpr,
    alpha: f64,
    x0: f64,
    y0: f64,
    out: *mut *mut LogodeSolution,
) -> LogodeStatus {
    first_order(f, g, out, |f, g| EquationSpec::Bernoulli { f, g, alpha }, x0, y0)
}

/// Solve `y' + f e^(beta y) = g`, `y(x0) = y0`.
///
/// # Safety
/// `f`, `g` must be live expression handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn logode_solve_exp(
    f: *const LogodeExpr,
    g: *const LogodeExpr,
    beta: f64,
    x0: f64,
    y0: f64,
    out: *mut *mut LogodeSolution,
) -> LogodeStatus {
    first_order(f, g, out, |f, g| EquationSpec::Exp { f, g, beta }, x0, y0)
}

/// Solve `y'' + b y' + c y = 0`, `y(x0) = y0`, `y'(x0) = yp0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn logode_solve_second_order(
    b: f64,
    c: f64,
    x0: f64,
    y0: f64,
    yp0: f64,
    out: *mut *mut LogodeSolution,
) -> LogodeStatus {
    guarded(|| {
        if out.is_null() {
            return fail(LogodeStatus::NullPointer, "null argument");
        }
        finish_solve(EquationSpec::SecondOrder { b, c }, InitialCondition::with_slope(x0, y0, yp0), out)
    })
}

/// Evaluate the solution at `x`.
///
/// # Safety
/// `sol` must be a live solution handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn logode_solution_eval(sol: *const LogodeSolution, x: f64, out: *mut f64) -> LogodeStatus {
    guarded(|| {
        if sol.is_null() || out.is_null() {
            return fail(LogodeStatus::NullPointer, "null argument");
        }
        match (*sol).sol.eval(x) {
            Ok(v) => {
                *out = v;
                LogodeStatus::Ok
            }
            Err(e) => fail(solve_status(&e), e.to_string()),
        }
    })
}

/// Evaluate at `n` points `xs[i]` into `out[i]`. Stops at the first failure.
///
/// # Safety
/// `xs` and `out` must point to `n` readable and writable doubles.
#[no_mangle]
pub unsafe extern "C" fn logode_solution_eval_many(
    sol: *const LogodeSolution,
    xs: *const f64,
    n: usize,
    out: *mut f64,
) -> LogodeStatus {
    guarded(|| {
        if sol.is_null() || (n > 0 && (xs.is_null() || out.is_null())) {
            return fail(LogodeStatus::NullPointer, "null argument");
        }
        if n == 0 {
            return LogodeStatus::Ok;
        }
        let xs = std::slice::from_raw_parts(xs, n);
        let out = std::slice::from_raw_parts_mut(out, n);
        for (x, y) in xs.iter().zip(out.iter_mut()) {
            match (*sol).sol.eval(*x) {
                Ok(v) => *y = v,
                Err(e) => return fail(solve_status(&e), e.to_string()),
            }
        }
        LogodeStatus::Ok
    })
}

/// Current validity interval. Bounds may be infinite.
///
/// # Safety
/// `sol` must be a live solution handle; `lo`, `hi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn logode_solution_validity(
    sol: *const LogodeSolution,
    lo: *mut f64,
    hi: *mut f64,
) -> LogodeStatus {
    guarded(|| {
        if sol.is_null() || lo.is_null() || hi.is_null() {
            return fail(LogodeStatus::NullPointer, "null argument");
        }
        let v = (*sol).sol.validity();
        *lo = v.lo;
        *hi = v.hi;
        LogodeStatus::Ok
    })
}

/// Narrow the validity interval by scanning `[lo, hi]` for the first
/// failure on each side of the anchor; writes the result to `out_lo`,
/// `out_hi`. `samples == 0` selects the default density.
///
/// # Safety
/// `sol` must be a live solution handle not in use by other threads.
#[no_mangle]
pub unsafe extern "C" fn logode_solution_scan_validity(
    sol: *mut LogodeSolution,
    lo: f64,
    hi: f64,
    samples: usize,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> LogodeStatus {
    guarded(|| {
        if sol.is_null() || out_lo.is_null() || out_hi.is_null() {
            return fail(LogodeStatus::NullPointer, "null argument");
        }
        if !(lo < hi) {
            return fail(LogodeStatus::InvalidArgument, format!("empty interval [{lo}, {hi}]"));
        }
        let samples = if samples == 0 { logode::solvers::DEFAULT_SCAN_SAMPLES } else { samples };
        match (*sol).sol.scan_validity(Interval::new(lo, hi), samples) {
            Ok(v) => {
                *out_lo = v.lo;
                *out_hi = v.hi;
                LogodeStatus::Ok
            }
            Err(e) => fail(solve_status(&e), e.to_string()),
        }
    })
}

/// Run every applicable check on `[lo, hi]` and write a JSON report to
/// `*out_json` (release with `logode_string_free`). Returns
/// `LOGODE_STATUS_VERIFICATION_FAILED` with the report still written when a
/// check fails. `check_tol <= 0` selects the default oracle tolerance.
///
/// # Safety
/// `sol` must be a live solution handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn logode_solution_verify(
    sol: *const LogodeSolution,
    lo: f64,
    hi: f64,
    check_tol: f64,
    out_json: *mut *mut c_char,
) -> LogodeStatus {
    guarded(|| {
        if sol.is_null() || out_json.is_null() {
            return fail(LogodeStatus::NullPointer, "null argument");
        }
        if !(lo < hi) {
            return fail(LogodeStatus::InvalidArgument, format!("empty interval [{lo}, {hi}]"));
        }
        let s = &*sol;
        let mut cfg = VerifyConfig::default();
        if check_tol > 0.0 {
            cfg.compare_tol = check_tol;
        }
        cfg.perturb = s.sol.offset();
        let report = match verify::full_verify(&s.spec, &s.ic, Interval::new(lo, hi), &cfg) {
            Ok(r) => r,
            Err(e) => return fail(verify_status(&e), e.to_string()),
        };
        let json = serde_json::to_string(&report).expect("report serializes");
        *out_json = CString::new(json).expect("JSON has no NULs").into_raw();
        if report.pass {
            LogodeStatus::Ok
        } else {
            fail(LogodeStatus::VerificationFailed, "verification failed")
        }
    })
}

/// Release a solution handle. NULL is ignored.
///
/// # Safety
/// `sol` must come from a `logode_solve_*` call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn logode_solution_free(sol: *mut LogodeSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn logode_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
