//! Exercises the C entry points through their extern declarations and checks
//! the generated header ships the full surface.

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use hypercode_ffi::*;

fn fixture(name: &str) -> CString {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn code_parse_verify_free() {
    unsafe {
        let json = fixture("remark62.json");
        let mut code = ptr::null_mut();
        assert_eq!(hc_code_parse(json.as_ptr(), &mut code), HC_OK);
        assert_eq!(hc_code_size(code), 3);

        let mut report = ptr::null_mut();
        assert_eq!(hc_code_verify(code, 1e-9, &mut report), HC_OK);
        let doc: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(report).to_str().unwrap()).unwrap();
        assert_eq!(doc["strict"], serde_json::json!(true));
        assert_eq!(doc["size"], serde_json::json!(3));
        hc_string_free(report);
        hc_code_free(code);
    }
}

#[test]
fn lattice_violation_reports_combination() {
    unsafe {
        let json = fixture("violating.json");
        let mut lat = ptr::null_mut();
        assert_eq!(hc_lattice_parse(json.as_ptr(), &mut lat), HC_OK);

        let mut report = ptr::null_mut();
        assert_eq!(hc_lattice_check(lat, &mut report), HC_FAIL);
        let doc: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(report).to_str().unwrap()).unwrap();
        assert_eq!(doc["outcome"], serde_json::json!("violation"));
        assert_eq!(doc["combination"]["p"], serde_json::json!("4"));
        assert_eq!(doc["combination"]["q"], serde_json::json!("3"));
        hc_string_free(report);
        hc_lattice_free(lat);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut code = ptr::null_mut();
        assert_eq!(hc_code_parse(ptr::null(), &mut code), HC_ERR_NULL);
        let bad = CString::new("{\"n\": }").unwrap();
        assert_eq!(hc_code_parse(bad.as_ptr(), &mut code), HC_ERR_INPUT);
        let good = fixture("remark62.json");
        assert_eq!(hc_code_parse(good.as_ptr(), ptr::null_mut()), HC_ERR_NULL);
        assert_eq!(hc_code_verify(ptr::null(), 1e-9, ptr::null_mut()), HC_ERR_NULL);
        assert_eq!(hc_code_size(ptr::null()), -1);
        hc_string_free(ptr::null_mut());
        hc_code_free(ptr::null_mut());
        hc_lattice_free(ptr::null_mut());
    }
}

#[test]
fn numeric_entry_points() {
    unsafe {
        let mut max_cos = 0.0f64;
        assert_eq!(hc_lemma61_max(1.0, 1.0, 8, 0, &mut max_cos), HC_OK);
        assert!((max_cos - 0.75).abs() <= 1e-6, "max cos {max_cos}");

        let (mut lower, mut upper) = (0i64, 0i64);
        assert_eq!(hc_bounds(3, &mut lower, &mut upper), HC_OK);
        assert_eq!((lower, upper), (3, 10));
        assert_eq!(hc_lemma61_max(1.0, 1.0, 8, 0, ptr::null_mut()), HC_ERR_NULL);
    }
}

#[test]
fn version_and_header() {
    unsafe {
        let v = CStr::from_ptr(hc_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/hypercode.h");
    let text = std::fs::read_to_string(header).expect("generated header");
    for symbol in [
        "hc_version",
        "hc_string_free",
        "hc_code_parse",
        "hc_code_verify",
        "hc_code_free",
        "hc_lattice_parse",
        "hc_lattice_check",
        "hc_lattice_free",
        "hc_lemma61_max",
        "hc_bounds",
        "HC_OK",
        "HC_FAIL",
        "HC_ERR_INPUT",
        "struct HcCode HcCode",
        "struct HcLattice HcLattice",
    ] {
        assert!(text.contains(symbol), "header missing {symbol}");
    }
}
