//! C interface: opaque handles, integer status codes, JSON strings in and
//! out. Every string returned through an out-parameter must be released
//! with `hc_string_free`; every handle with its matching `_free`.

use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hypercode::code::verify_strict;
use hypercode::io::{CodeFile, LatticeFile};
use hypercode::lattice::{check_family, FamilyOutcome, GramLattice};
use hypercode::search::lemma61_max;
use hypercode::tol::Tolerances;
use hypercode::bounds;
use hypercode::code::HyperbolicCode;

/// Success; for verdict-producing calls, the positive outcome.
pub const HC_OK: c_int = 0;
/// The computation succeeded but reports a failure or violation.
pub const HC_FAIL: c_int = 1;
/// Malformed or inconsistent input.
pub const HC_ERR_INPUT: c_int = 2;
/// A required pointer argument was null.
pub const HC_ERR_NULL: c_int = 3;
/// An argument string was not valid UTF-8.
pub const HC_ERR_UTF8: c_int = 4;
/// Internal failure (panic caught at the boundary).
pub const HC_ERR_INTERNAL: c_int = 5;

pub struct HcCode {
    inner: HyperbolicCode,
}

pub struct HcLattice {
    inner: GramLattice,
}

static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
    Ok(v) => v,
    Err(_) => panic!("version string contains a NUL"),
};

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    VERSION.as_ptr()
}

/// Release a string returned by this library. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn hc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn read_utf8<'a>(s: *const c_char) -> Result<&'a str, c_int> {
    if s.is_null() {
        return Err(HC_ERR_NULL);
    }
    CStr::from_ptr(s).to_str().map_err(|_| HC_ERR_UTF8)
}

fn emit_json<T: serde::Serialize>(value: &T, out: *mut *mut c_char) -> c_int {
    if out.is_null() {
        return HC_ERR_NULL;
    }
    let raw = match serde_json::to_string(value) {
        Ok(r) => r,
        Err(_) => return HC_ERR_INTERNAL,
    };
    match CString::new(raw) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            HC_OK
        }
        Err(_) => HC_ERR_INTERNAL,
    }
}

fn guarded(f: impl FnOnce() -> c_int) -> c_int {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(HC_ERR_INTERNAL)
}

/// Parse a JSON code file (vectors, or descriptors when vectors are empty)
/// into a handle. On success writes the handle and returns `HC_OK`.
#[no_mangle]
pub unsafe extern "C" fn hc_code_parse(json: *const c_char, out: *mut *mut HcCode) -> c_int {
    guarded(|| {
        let raw = match read_utf8(json) {
            Ok(r) => r,
            Err(e) => return e,
        };
        if out.is_null() {
            return HC_ERR_NULL;
        }
        let file: CodeFile = match serde_json::from_str(raw) {
            Ok(f) => f,
            Err(_) => return HC_ERR_INPUT,
        };
        let code = match file.descriptors_to_code() {
            Ok(Some(c)) => c,
            Ok(None) => match file.to_code() {
                Ok(c) => c,
                Err(_) => return HC_ERR_INPUT,
            },
            Err(_) => return HC_ERR_INPUT,
        };
        *out = Box::into_raw(Box::new(HcCode { inner: code }));
        HC_OK
    })
}

/// Number of vectors in the code, or -1 on null.
#[no_mangle]
pub unsafe extern "C" fn hc_code_size(code: *const HcCode) -> c_int {
    if code.is_null() {
        return -1;
    }
    (*code).inner.len() as c_int
}

/// Verify strictness. Returns `HC_OK` when the code is strict, `HC_FAIL`
/// when it is not, and an error code otherwise. When `out_report` is
/// non-null it receives the full JSON report in either verdict case.
#[no_mangle]
pub unsafe extern "C" fn hc_code_verify(
    code: *const HcCode,
    tol: c_double,
    out_report: *mut *mut c_char,
) -> c_int {
    guarded(|| {
        if code.is_null() {
            return HC_ERR_NULL;
        }
        let tolerances = Tolerances::uniform(tol);
        let report = match verify_strict(&(*code).inner, &tolerances) {
            Ok(r) => r,
            Err(_) => return HC_ERR_INPUT,
        };
        if !out_report.is_null() {
            let status = emit_json(&report, out_report);
            if status != HC_OK {
                return status;
            }
        }
        if report.strict {
            HC_OK
        } else {
            HC_FAIL
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn hc_code_free(code: *mut HcCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Parse a JSON lattice file into a handle.
#[no_mangle]
pub unsafe extern "C" fn hc_lattice_parse(json: *const c_char, out: *mut *mut HcLattice) -> c_int {
    guarded(|| {
        let raw = match read_utf8(json) {
            Ok(r) => r,
            Err(e) => return e,
        };
        if out.is_null() {
            return HC_ERR_NULL;
        }
        let file: LatticeFile = match serde_json::from_str(raw) {
            Ok(f) => f,
            Err(_) => return HC_ERR_INPUT,
        };
        let lattice = match file.to_lattice() {
            Ok(l) => l,
            Err(_) => return HC_ERR_INPUT,
        };
        if lattice.validate().is_err() {
            return HC_ERR_INPUT;
        }
        *out = Box::into_raw(Box::new(HcLattice { inner: lattice }));
        HC_OK
    })
}

/// Run the family dichotomy. `HC_OK` for a certificate, `HC_FAIL` for a
/// violating pair; `out_report` (optional) receives the JSON outcome.
#[no_mangle]
pub unsafe extern "C" fn hc_lattice_check(
    lattice: *const HcLattice,
    out_report: *mut *mut c_char,
) -> c_int {
    guarded(|| {
        if lattice.is_null() {
            return HC_ERR_NULL;
        }
        let outcome = match check_family(&(*lattice).inner) {
            Ok(o) => o,
            Err(_) => return HC_ERR_INPUT,
        };
        if !out_report.is_null() {
            let status = emit_json(&outcome, out_report);
            if status != HC_OK {
                return status;
            }
        }
        match outcome {
            FamilyOutcome::Certificate { .. } => HC_OK,
            FamilyOutcome::Violation { .. } => HC_FAIL,
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn hc_lattice_free(lattice: *mut HcLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Maximal cosine of the viewing angle in the three-ball configuration with
/// radii `d1`, `d2` against a unit third ball. Writes the value to
/// `out_max_cos`.
#[no_mangle]
pub unsafe extern "C" fn hc_lemma61_max(
    d1: c_double,
    d2: c_double,
    restarts: u32,
    seed: u64,
    out_max_cos: *mut c_double,
) -> c_int {
    guarded(|| {
        if out_max_cos.is_null() {
            return HC_ERR_NULL;
        }
        match lemma61_max(d1, d2, restarts as usize, seed) {
            Ok(r) => {
                *out_max_cos = r.max_cos;
                HC_OK
            }
            Err(_) => HC_ERR_INPUT,
        }
    })
}

/// Integer sandwich for the maximal strict code size in dimension `dim`.
/// Bounds that cannot be derived from built-in kissing values are reported
/// as -1.
#[no_mangle]
pub unsafe extern "C" fn hc_bounds(dim: u32, out_lower: *mut i64, out_upper: *mut i64) -> c_int {
    guarded(|| {
        if out_lower.is_null() || out_upper.is_null() {
            return HC_ERR_NULL;
        }
        match bounds::r_bounds(dim as usize, None) {
            Ok(r) => {
                *out_lower = r.lower.map_or(-1, |v| v as i64);
                *out_upper = r.upper.map_or(-1, |v| v as i64);
                HC_OK
            }
            Err(_) => HC_ERR_INPUT,
        }
    })
}
