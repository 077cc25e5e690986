//! C ABI over the verification engine.
//!
//! Inputs are the same JSON documents the command-line tool reads. Every
//! entry point returns an `SmStatus`; reports and documents come back
//! through out-pointers as opaque handles or owned strings. The message for
//! the most recent non-`SM_OK` status on a thread is available from
//! `sm_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use shifted_manin::cli::{
    check_algebra, double_algebra, koszul_algebra, quantize_algebra, yangian, AlgebraFile, InputError, ModuleFile,
    Outcome, RMatrixFile, SuiteKind, EXIT_FAIL, EXIT_INPUT, EXIT_OVERFLOW, EXIT_PASS,
};
use shifted_manin::exactnum::parse_rational;
use shifted_manin::koszul::KoszulBounds;
use shifted_manin::loopyang::{DifferenceRMatrix, YangianConfig};
use shifted_manin::report::Report;

/// Result of every call. The first four match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    SmOk = 0,
    SmFailed = 1,
    SmInvalidInput = 2,
    SmOverflow = 3,
    SmNullPointer = 4,
    SmInvalidUtf8 = 5,
    SmPanic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmSuite {
    SmSuiteLie = 0,
    SmSuiteMetric = 1,
    SmSuiteBialgebra = 2,
    SmSuiteTriple = 3,
}

/// A parsed algebra document.
pub struct SmAlgebra(AlgebraFile);

/// The outcome of a suite.
pub struct SmReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(code: i32) -> SmStatus {
    match code {
        EXIT_PASS => SmStatus::SmOk,
        EXIT_FAIL => SmStatus::SmFailed,
        EXIT_INPUT => SmStatus::SmInvalidInput,
        EXIT_OVERFLOW => SmStatus::SmOverflow,
        _ => SmStatus::SmPanic,
    }
}

/// Runs `f`, turning panics into `SmPanic` and errors into the thread's last error.
fn guard(f: impl FnOnce() -> Result<SmStatus, (SmStatus, String)>) -> SmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            SmStatus::SmPanic
        }
    }
}

fn input(e: InputError) -> (SmStatus, String) {
    (SmStatus::SmInvalidInput, e.0)
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (SmStatus, String)> {
    if p.is_null() {
        return Err((SmStatus::SmNullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (SmStatus::SmInvalidUtf8, e.to_string()))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Stores the report, if any, and maps the outcome's code.
unsafe fn finish(out: Outcome, report: *mut *mut SmReport) -> Result<SmStatus, (SmStatus, String)> {
    let status = status_of(out.code);
    if let Some(rep) = out.report {
        if status != SmStatus::SmOk {
            let w = rep
                .checks
                .iter()
                .find(|c| !c.passed())
                .map(|c| format!("{}: {}", c.name, c.witness.as_deref().unwrap_or("")));
            set_error(w.unwrap_or_else(|| "failed".into()));
        }
        *report = Box::into_raw(Box::new(SmReport(rep)));
    }
    Ok(status)
}

fn null_out<T>(p: *mut *mut T) -> Result<(), (SmStatus, String)> {
    if p.is_null() {
        Err((SmStatus::SmNullPointer, "null out-pointer".into()))
    } else {
        Ok(())
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last non-`SM_OK` status on this thread, or NULL.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses an algebra document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
/// On success `*out` owns a handle to release with `sm_algebra_free`.
#[no_mangle]
pub unsafe extern "C" fn sm_algebra_from_json(json: *const c_char, out: *mut *mut SmAlgebra) -> SmStatus {
    guard(|| {
        null_out(out)?;
        *out = ptr::null_mut();
        let f = AlgebraFile::parse(read_str(json)?).map_err(input)?;
        *out = Box::into_raw(Box::new(SmAlgebra(f)));
        Ok(SmStatus::SmOk)
    })
}

/// # Safety
/// `a` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sm_algebra_free(a: *mut SmAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Number of basis vectors.
///
/// # Safety
/// `a` must be a live algebra handle and `dim` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_algebra_dim(a: *const SmAlgebra, dim: *mut usize) -> SmStatus {
    guard(|| {
        if a.is_null() || dim.is_null() {
            return Err((SmStatus::SmNullPointer, "null argument".into()));
        }
        *dim = (*a).0.basis.len();
        Ok(SmStatus::SmOk)
    })
}

/// Runs one structural suite. `SM_OK` means every check passed; on
/// `SM_OK` or `SM_FAILED` a report is stored in `*report`.
///
/// # Safety
/// `a` must be a live algebra handle and `report` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_check(a: *const SmAlgebra, suite: SmSuite, report: *mut *mut SmReport) -> SmStatus {
    guard(|| {
        null_out(report)?;
        *report = ptr::null_mut();
        if a.is_null() {
            return Err((SmStatus::SmNullPointer, "null algebra".into()));
        }
        let kind = match suite {
            SmSuite::SmSuiteLie => SuiteKind::Lie,
            SmSuite::SmSuiteMetric => SuiteKind::Metric,
            SmSuite::SmSuiteBialgebra => SuiteKind::Bialgebra,
            SmSuite::SmSuiteTriple => SuiteKind::Triple,
        };
        finish(check_algebra(&(*a).0, kind).map_err(input)?, report)
    })
}

/// Builds the double of a bialgebra document as a new algebra document.
/// `*double_json` is NULL when the input fails its checks.
///
/// # Safety
/// `a` must be a live handle; `double_json` and `report` writable. The string
/// is released with `sm_string_free`, the report with `sm_report_free`.
#[no_mangle]
pub unsafe extern "C" fn sm_double(
    a: *const SmAlgebra,
    double_json: *mut *mut c_char,
    report: *mut *mut SmReport,
) -> SmStatus {
    guard(|| {
        null_out(double_json)?;
        null_out(report)?;
        *double_json = ptr::null_mut();
        *report = ptr::null_mut();
        if a.is_null() {
            return Err((SmStatus::SmNullPointer, "null algebra".into()));
        }
        let mut out = double_algebra(&(*a).0, false).map_err(input)?;
        if let Some(doc) = out.document.take() {
            *double_json = owned(doc);
        }
        finish(out, report)
    })
}

/// r-matrix and enveloping-algebra suites of a triple.
///
/// # Safety
/// `a` must be a live handle and `report` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_quantize(
    a: *const SmAlgebra,
    hbar_order: usize,
    word_len: usize,
    report: *mut *mut SmReport,
) -> SmStatus {
    guard(|| {
        null_out(report)?;
        *report = ptr::null_mut();
        if a.is_null() {
            return Err((SmStatus::SmNullPointer, "null algebra".into()));
        }
        finish(quantize_algebra(&(*a).0, hbar_order, word_len).map_err(input)?, report)
    })
}

/// The twisted Koszul complex of a triple.
///
/// # Safety
/// `a` must be a live handle and `report` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_koszul(
    a: *const SmAlgebra,
    max_weight: usize,
    word_len: usize,
    hbar_order: usize,
    report: *mut *mut SmReport,
) -> SmStatus {
    guard(|| {
        null_out(report)?;
        *report = ptr::null_mut();
        if a.is_null() {
            return Err((SmStatus::SmNullPointer, "null algebra".into()));
        }
        let bounds = KoszulBounds { sym_weight: max_weight, word_len, hbar_order };
        finish(koszul_algebra(&(*a).0, bounds).map_err(input)?, report)
    })
}

/// Loop suite for a base algebra with β. `rmatrix_json` may be NULL for
/// Yang's r-matrix; `level` is a rational such as "1" or "-2/3".
///
/// # Safety
/// `g` must be a live handle; `modules_json` must point to `n_modules`
/// NUL-terminated strings (or be NULL when `n_modules` is 0); `level` must be
/// a NUL-terminated string; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_yangian(
    g: *const SmAlgebra,
    rmatrix_json: *const c_char,
    modules_json: *const *const c_char,
    n_modules: usize,
    truncation: usize,
    level: *const c_char,
    hbar_order: usize,
    word_len: usize,
    report: *mut *mut SmReport,
) -> SmStatus {
    guard(|| {
        null_out(report)?;
        *report = ptr::null_mut();
        if g.is_null() || (modules_json.is_null() && n_modules > 0) {
            return Err((SmStatus::SmNullPointer, "null argument".into()));
        }
        let base = (*g).0.base_algebra().map_err(input)?;
        let r = if rmatrix_json.is_null() {
            DifferenceRMatrix::yang(&base)
        } else {
            RMatrixFile::parse(read_str(rmatrix_json)?).and_then(|f| f.to_r(&base)).map_err(input)?
        };
        let mut modules = Vec::with_capacity(n_modules);
        for i in 0..n_modules {
            let text = read_str(*modules_json.add(i))?;
            let m = ModuleFile::parse(text).and_then(|m| m.to_module(&base));
            modules.push(m.map_err(|e| (SmStatus::SmInvalidInput, format!("module {i}: {}", e.0)))?);
        }
        let level = parse_rational(read_str(level)?).map_err(|e| (SmStatus::SmInvalidInput, format!("level: {e}")))?;
        let config = YangianConfig { truncation, level, hbar_order, word_len, ..YangianConfig::default() };
        finish(yangian(&base, &r, &modules, &config).map_err(input)?, report)
    })
}

/// Whether every check in the report passed.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn sm_report_passed(r: *const SmReport) -> bool {
    !r.is_null() && (*r).0.all_pass()
}

/// Number of checks in the report.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn sm_report_len(r: *const SmReport) -> usize {
    if r.is_null() {
        0
    } else {
        (*r).0.checks.len()
    }
}

/// The report as JSON (compact unless `pretty`); NULL when `r` is NULL.
///
/// # Safety
/// `r` must be NULL or a live report handle. Release the string with
/// `sm_string_free`.
#[no_mangle]
pub unsafe extern "C" fn sm_report_json(r: *const SmReport, pretty: bool) -> *mut c_char {
    if r.is_null() {
        return ptr::null_mut();
    }
    owned((*r).0.to_json(pretty))
}

/// The report as indented text; NULL when `r` is NULL.
///
/// # Safety
/// As for `sm_report_json`.
#[no_mangle]
pub unsafe extern "C" fn sm_report_text(r: *const SmReport) -> *mut c_char {
    if r.is_null() {
        return ptr::null_mut();
    }
    owned((*r).0.to_text())
}

/// # Safety
/// `r` must be NULL or a report handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sm_report_free(r: *mut SmReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
