use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use shifted_manin_ffi::*;

fn corpus(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    CString::new(std::fs::read_to_string(p).unwrap()).unwrap()
}

fn algebra(name: &str) -> *mut SmAlgebra {
    let mut a = ptr::null_mut();
    let json = corpus(name);
    assert_eq!(unsafe { sm_algebra_from_json(json.as_ptr(), &mut a) }, SmStatus::SmOk);
    assert!(!a.is_null());
    a
}

fn last_error() -> String {
    let p = sm_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn double_matches_the_golden_document() {
    let a = algebra("e1.json");
    let (mut doc, mut rep) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(sm_double(a, &mut doc, &mut rep), SmStatus::SmOk);
        let got = CStr::from_ptr(doc).to_str().unwrap();
        assert_eq!(got, corpus("e1_double.json").to_str().unwrap());
        assert!(sm_report_passed(rep));
        assert!(sm_report_len(rep) > 10);
        sm_string_free(doc);
        sm_report_free(rep);
        sm_algebra_free(a);
    }
}

#[test]
fn failing_checks_report_a_witness() {
    let a = algebra("e1_double_bad_kappa.json");
    let mut rep = ptr::null_mut();
    unsafe {
        assert_eq!(sm_check(a, SmSuite::SmSuiteMetric, &mut rep), SmStatus::SmFailed);
        assert!(!sm_report_passed(rep));
        let json = sm_report_json(rep, false);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["suite"], "metric");
        sm_string_free(json);
        sm_report_free(rep);
        sm_algebra_free(a);
    }
    assert!(last_error().contains("κ(ε^f, f)"));
}

#[test]
fn malformed_json_is_an_input_error() {
    let mut a = ptr::null_mut();
    let bad = CString::new("{\"schema\": \"shifted-manin/algebra/v1\", \"basis\": [}").unwrap();
    assert_eq!(unsafe { sm_algebra_from_json(bad.as_ptr(), &mut a) }, SmStatus::SmInvalidInput);
    assert!(a.is_null());
    assert!(last_error().contains("line 1"));
    assert_eq!(unsafe { sm_algebra_from_json(ptr::null(), &mut a) }, SmStatus::SmNullPointer);
    let junk = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { sm_algebra_from_json(junk.as_ptr().cast(), &mut a) }, SmStatus::SmInvalidUtf8);
}

#[test]
fn null_handles_are_rejected() {
    let mut rep = ptr::null_mut();
    let mut dim = 0usize;
    unsafe {
        assert_eq!(sm_check(ptr::null(), SmSuite::SmSuiteLie, &mut rep), SmStatus::SmNullPointer);
        assert_eq!(sm_algebra_dim(ptr::null(), &mut dim), SmStatus::SmNullPointer);
        assert!(!sm_report_passed(ptr::null()));
        assert!(sm_report_json(ptr::null(), true).is_null());
        sm_report_free(ptr::null_mut());
        sm_algebra_free(ptr::null_mut());
        sm_string_free(ptr::null_mut());
    }
}

#[test]
fn quantize_and_overflow() {
    let a = algebra("e1_double.json");
    let mut rep = ptr::null_mut();
    let mut dim = 0;
    unsafe {
        assert_eq!(sm_algebra_dim(a, &mut dim), SmStatus::SmOk);
        assert_eq!(dim, 4);
        assert_eq!(sm_quantize(a, 3, 6, &mut rep), SmStatus::SmOk);
        sm_report_free(rep);
        assert_eq!(sm_quantize(a, 3, 2, &mut rep), SmStatus::SmOverflow);
        sm_report_free(rep);
        assert_eq!(sm_koszul(a, 3, 5, 2, &mut rep), SmStatus::SmOk);
        sm_report_free(rep);
        sm_algebra_free(a);
    }
}

#[test]
fn yangian_with_modules() {
    let g = algebra("sl2.json");
    let ev = corpus("ev2.json");
    let mods = [ev.as_ptr(), ev.as_ptr()];
    let level = CString::new("1").unwrap();
    let mut rep = ptr::null_mut();
    unsafe {
        let s = sm_yangian(g, ptr::null(), mods.as_ptr(), 2, 2, level.as_ptr(), 3, 6, &mut rep);
        assert_eq!(s, SmStatus::SmOk);
        sm_report_free(rep);
        let lin = corpus("linear_tail.json");
        let s = sm_yangian(g, lin.as_ptr(), ptr::null(), 0, 2, level.as_ptr(), 3, 6, &mut rep);
        assert_eq!(s, SmStatus::SmInvalidInput);
        assert!(rep.is_null());
        sm_algebra_free(g);
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(sm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn profile_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/shifted_manin.h")).unwrap();
    for f in [
        "sm_version",
        "sm_last_error",
        "sm_algebra_from_json",
        "sm_algebra_free",
        "sm_algebra_dim",
        "sm_check",
        "sm_double",
        "sm_quantize",
        "sm_koszul",
        "sm_yangian",
        "sm_report_passed",
        "sm_report_len",
        "sm_report_json",
        "sm_report_text",
        "sm_report_free",
        "sm_string_free",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from the header");
    }
    assert!(h.contains("SM_INVALID_INPUT = 2"));
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = profile_dir().join("libshifted_manin_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "shifted_manin.h"

int main(int argc, char **argv) {
    FILE *f = fopen(argv[1], "rb");
    static char buf[1 << 16];
    size_t n = fread(buf, 1, sizeof buf - 1, f);
    buf[n] = 0;
    fclose(f);
    SmAlgebra *a = NULL;
    if (sm_algebra_from_json(buf, &a) != SM_OK) return 10;
    char *doc = NULL;
    SmReport *rep = NULL;
    if (sm_double(a, &doc, &rep) != SM_OK) return 11;
    if (!sm_report_passed(rep) || strstr(doc, "\"ε^f\"") == NULL) return 12;
    sm_string_free(doc);
    sm_report_free(rep);
    if (sm_check(a, SM_SUITE_LIE, &rep) != SM_OK) return 13;
    sm_report_free(rep);
    sm_algebra_free(a);
    if (sm_algebra_from_json("{", &a) != SM_INVALID_INPUT || sm_last_error() == NULL) return 14;
    printf("%s\n", sm_version());
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let e1 = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/e1.json");
    let out = Command::new(&exe).arg(e1).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
}
