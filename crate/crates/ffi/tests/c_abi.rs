use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use logode_ffi::*;

fn expr(text: &str) -> *mut LogodeExpr {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { logode_expr_parse(c.as_ptr(), &mut out) }, LogodeStatus::Ok);
    out
}

fn last_error() -> String {
    let p = logode_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn expression_roundtrip_and_errors() {
    let e = expr("x^2 + 1");
    let mut v = 0.0;
    assert_eq!(unsafe { logode_expr_eval(e, 3.0, &mut v) }, LogodeStatus::Ok);
    assert_eq!(v, 10.0);
    assert!(logode_last_error().is_null());
    unsafe { logode_expr_free(e) };

    let bad = CString::new("2*+x").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { logode_expr_parse(bad.as_ptr(), &mut out) }, LogodeStatus::ParseError);
    assert!(out.is_null());
    assert!(last_error().contains("offset 2"));

    let l = expr("log(x)");
    assert_eq!(unsafe { logode_expr_eval(l, -1.0, &mut v) }, LogodeStatus::DomainError);
    unsafe { logode_expr_free(l) };

    assert_eq!(unsafe { logode_expr_parse(ptr::null(), &mut out) }, LogodeStatus::NullPointer);
    unsafe { logode_expr_free(ptr::null_mut()) };
}

#[test]
fn linear_solution_through_handles() {
    let (f, g) = (expr("1"), expr("0"));
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { logode_solve_linear(f, g, 0.0, 1.0, &mut sol) }, LogodeStatus::Ok);
    unsafe {
        logode_expr_free(f);
        logode_expr_free(g);
    }
    let xs = [0.0, 0.5, 1.0];
    let mut ys = [0.0; 3];
    assert_eq!(unsafe { logode_solution_eval_many(sol, xs.as_ptr(), 3, ys.as_mut_ptr()) }, LogodeStatus::Ok);
    for (x, y) in xs.iter().zip(ys) {
        assert!((y - (-x).exp()).abs() < 1e-10);
    }
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { logode_solution_verify(sol, 0.0, 2.0, 0.0, &mut json) }, LogodeStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { logode_string_free(json) };
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["pass"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 3);
    unsafe { logode_solution_free(sol) };
}

#[test]
fn validity_and_outside_validity() {
    // y' = y^2, y(0) = 1 blows up at x = 1
    let (f, g) = (expr("0"), expr("1"));
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { logode_solve_bernoulli(f, g, 2.0, 0.0, 1.0, &mut sol) }, LogodeStatus::Ok);
    unsafe {
        logode_expr_free(f);
        logode_expr_free(g);
    }
    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { logode_solution_scan_validity(sol, -1.0, 2.0, 0, &mut lo, &mut hi) }, LogodeStatus::Ok);
    assert_eq!(lo, -1.0);
    assert!(hi < 1.0 && hi > 0.999);
    let (mut vlo, mut vhi) = (0.0, 0.0);
    assert_eq!(unsafe { logode_solution_validity(sol, &mut vlo, &mut vhi) }, LogodeStatus::Ok);
    assert_eq!((vlo, vhi), (lo, hi));
    let mut y = 0.0;
    assert_eq!(unsafe { logode_solution_eval(sol, 1.5, &mut y) }, LogodeStatus::OutsideValidity);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { logode_solution_eval(sol, -1.0, &mut y) }, LogodeStatus::Ok);
    assert!((y - 0.5).abs() < 1e-10);
    unsafe { logode_solution_free(sol) };
}

#[test]
fn second_order_and_invalid_arguments() {
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { logode_solve_second_order(0.0, 1.0, 0.0, 0.0, 1.0, &mut sol) }, LogodeStatus::Ok);
    let mut y = 0.0;
    assert_eq!(unsafe { logode_solution_eval(sol, 1.0, &mut y) }, LogodeStatus::Ok);
    assert!((y - 1f64.sin()).abs() < 1e-14);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { logode_solution_verify(sol, 2.0, 1.0, 0.0, &mut json) }, LogodeStatus::InvalidArgument);
    assert!(json.is_null());
    unsafe { logode_solution_free(sol) };

    let (f, g) = (expr("1"), expr("1"));
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { logode_solve_bernoulli(f, g, 1.0, 0.0, 1.0, &mut sol) }, LogodeStatus::InvalidArgument);
    assert_eq!(unsafe { logode_solve_exp(f, g, 0.0, 0.0, 1.0, &mut sol) }, LogodeStatus::InvalidArgument);
    assert!(sol.is_null());
    unsafe {
        logode_expr_free(f);
        logode_expr_free(g);
    }
}

#[test]
fn errors_are_per_thread() {
    let bad = CString::new("(").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { logode_expr_parse(bad.as_ptr(), &mut out) }, LogodeStatus::ParseError);
    std::thread::spawn(|| assert!(logode_last_error().is_null())).join().unwrap();
    assert!(!logode_last_error().is_null());
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("logode.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for sym in [
        "logode_last_error",
        "logode_expr_parse",
        "logode_expr_eval",
        "logode_expr_free",
        "logode_solve_linear",
        "logode_solve_bernoulli",
        "logode_solve_exp",
        "logode_solve_second_order",
        "logode_solution_eval",
        "logode_solution_eval_many",
        "logode_solution_validity",
        "logode_solution_scan_validity",
        "logode_solution_verify",
        "logode_solution_free",
        "logode_string_free",
        "LOGODE_STATUS_OK = 0",
        "typedef struct LogodeSolution LogodeSolution",
    ] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "logode.h"

int main(void) {
    LogodeExpr *f = NULL, *g = NULL;
    LogodeSolution *s = NULL;
    if (logode_expr_parse("1", &f) != LOGODE_STATUS_OK) return 10;
    if (logode_expr_parse("0", &g) != LOGODE_STATUS_OK) return 11;
    if (logode_solve_linear(f, g, 0.0, 1.0, &s) != LOGODE_STATUS_OK) return 12;
    double y = 0.0;
    if (logode_solution_eval(s, 1.0, &y) != LOGODE_STATUS_OK) return 13;
    if (fabs(y - exp(-1.0)) > 1e-10) return 14;
    LogodeExpr *bad = NULL;
    if (logode_expr_parse("2*+x", &bad) != LOGODE_STATUS_PARSE_ERROR) return 15;
    if (logode_last_error() == NULL) return 16;
    logode_solution_free(s);
    logode_expr_free(f);
    logode_expr_free(g);
    printf("%.6f\n", y);
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("liblogode_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let dir = std::env::temp_dir().join(format!("logode_c_abi_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    let bin = dir.join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.367879");
    let _ = std::fs::remove_dir_all(&dir);
}
