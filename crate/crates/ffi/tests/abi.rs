use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qseries_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qs_last_error()) }.to_string_lossy().into_owned()
}

fn take(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { qs_string_free(p) };
    s
}

fn eval(expr: &str, order: i64) -> *mut QsSeries {
    let mut out = ptr::null_mut();
    let e = cs(expr);
    assert_eq!(unsafe { qs_eval(e.as_ptr(), order, 1, &mut out) }, QsStatus::Ok, "{}", last_error());
    out
}

fn show(s: *const QsSeries) -> String {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { qs_series_to_string(s, &mut p) }, QsStatus::Ok);
    take(p)
}

#[test]
fn series_round_trip_and_arithmetic() {
    let p = eval("inv(poch((q;q)_inf))", 6);
    assert_eq!(show(p), "1 + q + 2q^2 + 3q^3 + 5q^4 + 7q^5 + O(q^6)");
    let e = eval("poch((q;q)_inf)", 6);
    let mut prod = ptr::null_mut();
    assert_eq!(unsafe { qs_series_mul(p, e, &mut prod) }, QsStatus::Ok);
    assert_eq!(show(prod), "1 + O(q^6)");

    let mut c = ptr::null_mut();
    assert_eq!(unsafe { qs_series_coeff(p, 4, 1, &mut c) }, QsStatus::Ok);
    assert_eq!(take(c), "5");
    assert_eq!(unsafe { qs_series_coeff(p, 6, 1, &mut c) }, QsStatus::BeyondTruncation);
    assert!(!last_error().is_empty());

    let text = cs("1/2 - q^{1/3} + O(q^2)");
    let mut half = ptr::null_mut();
    assert_eq!(unsafe { qs_series_parse(text.as_ptr(), &mut half) }, QsStatus::Ok);
    let (mut n, mut d) = (0, 0);
    assert_eq!(unsafe { qs_series_order(half, &mut n, &mut d) }, QsStatus::Ok);
    assert_eq!((n, d), (2, 1));
    let mut sum = ptr::null_mut();
    assert_eq!(unsafe { qs_series_add(half, half, &mut sum) }, QsStatus::Ok);
    assert_eq!(show(sum), "1 - 2q^{1/3} + O(q^2)");
    let mut inv = ptr::null_mut();
    assert_eq!(unsafe { qs_series_inv(sum, &mut inv) }, QsStatus::Ok);

    for s in [p, e, prod, half, sum, inv] {
        unsafe { qs_series_free(s) };
    }
}

#[test]
fn errors_are_reported() {
    let mut out = ptr::null_mut();
    let bad = cs("inv(poch((q;q)_inf)");
    assert_eq!(unsafe { qs_eval(bad.as_ptr(), 10, 1, &mut out) }, QsStatus::Parse);
    assert!(last_error().contains("column"), "{}", last_error());
    assert!(out.is_null());
    let ok = cs("1");
    assert_eq!(unsafe { qs_eval(ok.as_ptr(), 0, 1, &mut out) }, QsStatus::InvalidArgument);
    assert_eq!(unsafe { qs_eval(ok.as_ptr(), 1, 0, &mut out) }, QsStatus::InvalidArgument);
    assert_eq!(unsafe { qs_eval(ptr::null(), 5, 1, &mut out) }, QsStatus::NullPointer);
    assert_eq!(unsafe { qs_eval(ok.as_ptr(), 5, 1, ptr::null_mut()) }, QsStatus::NullPointer);
    let zero = eval("sum(q, -q)", 5);
    assert_eq!(unsafe { qs_series_inv(zero, &mut out) }, QsStatus::NonInvertible);
    unsafe { qs_series_free(zero) };
    let invalid = [0xffu8, 0];
    assert_eq!(unsafe { qs_eval(invalid.as_ptr().cast(), 5, 1, &mut out) }, QsStatus::InvalidUtf8);
    assert_eq!(unsafe { qs_eval(ok.as_ptr(), 5, 1, &mut out) }, QsStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { qs_series_free(out) };
    unsafe { qs_series_free(ptr::null_mut()) };
    unsafe { qs_string_free(ptr::null_mut()) };
}

#[test]
fn verify_builtin_identities() {
    let mut equal = false;
    let id = cs("RR-2");
    assert_eq!(unsafe { qs_verify(id.as_ptr(), 60, &mut equal) }, QsStatus::Ok);
    assert!(equal);
    let missing = cs("no-such-id");
    assert_eq!(unsafe { qs_verify(missing.as_ptr(), 60, &mut equal) }, QsStatus::UnknownIdentity);
    assert!(last_error().contains("no-such-id"));
}

#[test]
fn modularity_entry_points() {
    let list = cs("[[1176, 84, -2], [1176, 168, -1], [1176, 252, -2], [1176, 420, -3], [1176, 504, -1], [1176, 588, -1]]");
    let mut m = QsModcheck::default();
    assert_eq!(unsafe { qs_modcheck(list.as_ptr(), 7056, &mut m) }, QsStatus::Ok);
    assert_eq!((m.valinf_num, m.valinf_den, m.val0_num, m.val0_den, m.modular), (128, 1, -10, 1, true));

    let eta = cs("[[2,1,1]]");
    let mut s = QsScaling::default();
    assert_eq!(unsafe { qs_find_scaling(eta.as_ptr(), 0, &mut s) }, QsStatus::Ok);
    assert_eq!(s.level, s.k * s.n0 * 2);
    let bad = cs("[[2,1]");
    assert_eq!(unsafe { qs_modcheck(bad.as_ptr(), 0, &mut m) }, QsStatus::Parse);
}

#[test]
fn header_is_current() {
    let h = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qseries.h")).unwrap();
    for sym in [
        "typedef struct QsSeries QsSeries;",
        "QS_STATUS_OK = 0",
        "qs_eval(",
        "qs_series_parse(",
        "qs_series_coeff(",
        "qs_verify(",
        "qs_modcheck(",
        "qs_find_scaling(",
        "qs_last_error(",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}

fn cdylib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let deps = exe.parent()?;
    let name = format!("{}qseries_ffi{}", std::env::consts::DLL_PREFIX, std::env::consts::DLL_SUFFIX);
    let found = [deps, deps.parent()?].into_iter().map(|d| d.join(&name)).find(|p| p.exists());
    found
}

#[test]
fn c_program_links_against_header() {
    let Some(lib) = cdylib() else {
        eprintln!("cdylib not found next to the test binary; skipping");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi-c");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "qseries.h"
int main(void) {
    QsSeries *s = NULL;
    char *text = NULL;
    if (qs_eval("nahm(A=[[2]], B=[0], C=0)", 8, 1, &s) != QS_STATUS_OK) return 1;
    if (qs_series_to_string(s, &text) != QS_STATUS_OK) return 2;
    puts(text);
    qs_string_free(text);
    qs_series_free(s);
    if (qs_eval("(", 8, 1, &s) != QS_STATUS_PARSE) return 3;
    puts(qs_last_error());
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("main");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let libdir = lib.parent().unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg("-L")
        .arg(libdir)
        .arg("-lqseries_ffi")
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).env("LD_LIBRARY_PATH", libdir).env("DYLD_LIBRARY_PATH", libdir).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("1 + q + q^2 + q^3 + 2q^4 + 2q^5 + 3q^6 + 3q^7 + O(q^8)"));
    assert!(lines.next().unwrap().contains("line 1"));
}
