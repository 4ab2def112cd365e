use std::ffi::{CStr, CString};
use std::ptr;

use relcor_ffi::*;

const SPEC: &str =
    r#"{"type":"predicate","space":{"vars":[{"name":"x","min":0,"max":3}]},"dom":"x < 3","rel":"x' == x + 1"}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(relcor_last_error()).to_string_lossy().into_owned() }
}

unsafe fn program(src: &str) -> *mut RelcorProgram {
    let mut p = ptr::null_mut();
    assert_eq!(relcor_program_parse(c(src).as_ptr(), &mut p), RelcorStatus::Ok);
    p
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    relcor_string_free(s);
    out
}

#[test]
fn correctness_queries() {
    unsafe {
        let mut spec = ptr::null_mut();
        assert_eq!(relcor_spec_from_json(c(SPEC).as_ptr(), &mut spec), RelcorStatus::Ok);
        let dec = program("int x in 0..3; x = x - 1;");
        let inc = program("int x in 0..3; x = x + 1;");
        let keep = program("int x in 0..3; if (x == 0) x = 1; else x = 0;");

        let mut n = 99usize;
        assert_eq!(relcor_competence_domain_size(spec, dec, &mut n), RelcorStatus::Ok);
        assert_eq!(n, 0);
        assert_eq!(relcor_competence_domain_size(spec, keep, &mut n), RelcorStatus::Ok);
        assert_eq!(n, 1);
        assert_eq!(relcor_competence_domain_size(spec, inc, &mut n), RelcorStatus::Ok);
        assert_eq!(n, 3);

        let mut yes = false;
        assert_eq!(relcor_is_correct(spec, inc, &mut yes), RelcorStatus::Ok);
        assert!(yes);
        assert_eq!(relcor_is_correct(spec, dec, &mut yes), RelcorStatus::Ok);
        assert!(!yes);
        assert_eq!(relcor_more_correct(spec, keep, dec, true, &mut yes), RelcorStatus::Ok);
        assert!(yes);
        assert_eq!(relcor_more_correct(spec, dec, keep, false, &mut yes), RelcorStatus::Ok);
        assert!(!yes);

        let mut count = 0usize;
        assert_eq!(relcor_mutant_count(dec, c("aorb,lit").as_ptr(), &mut count), RelcorStatus::Ok);
        assert_eq!(count, 6);

        let mut text = ptr::null_mut();
        assert_eq!(relcor_program_text(inc, &mut text), RelcorStatus::Ok);
        assert!(take(text).contains("x = x + 1;"));

        let mut tree = ptr::null_mut();
        assert_eq!(relcor_repair(spec, dec, ptr::null(), &mut tree), RelcorStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(tree)).unwrap();
        assert_eq!(v["metrics"]["fault_depth_ub"], 1);

        let cfg = c(r#"{"operators":["AORB"],"selection":{"strategy":"exhaustive","bounds":{}},"fuel":100,"max_depth":1,"max_frontier":4,"mode":"exact","exec":"exact"}"#);
        assert_eq!(relcor_repair(spec, dec, cfg.as_ptr(), &mut tree), RelcorStatus::Ok);
        relcor_string_free(tree);

        for p in [dec, inc, keep] {
            relcor_program_free(p);
        }
        relcor_spec_free(spec);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(relcor_program_parse(c("int x in 0..3; x = ;").as_ptr(), &mut p), RelcorStatus::Syntax);
        assert!(p.is_null());
        assert!(last_error().contains("1:"), "{}", last_error());
        assert_eq!(relcor_program_parse(ptr::null(), &mut p), RelcorStatus::NullArgument);
        assert_eq!(relcor_program_parse(c("int x; skip;").as_ptr(), ptr::null_mut()), RelcorStatus::NullArgument);

        let bad = [0xffu8, 0];
        assert_eq!(relcor_program_parse(bad.as_ptr().cast(), &mut p), RelcorStatus::InvalidUtf8);

        let mut s = ptr::null_mut();
        assert_eq!(relcor_spec_from_json(c("{").as_ptr(), &mut s), RelcorStatus::Malformed);

        assert_eq!(relcor_spec_from_json(c(SPEC).as_ptr(), &mut s), RelcorStatus::Ok);
        let other = program("int y in 0..1; y = 0;");
        let mut n = 0usize;
        assert_eq!(relcor_competence_domain_size(s, other, &mut n), RelcorStatus::SpaceMismatch);
        assert_eq!(relcor_mutant_count(other, c("bogus").as_ptr(), &mut n), RelcorStatus::Malformed);
        let mut json = ptr::null_mut();
        let cfg = c(r#"{"selection":{"strategy":"exhaustive","bounds":{}}}"#);
        assert_eq!(relcor_repair(s, other, cfg.as_ptr(), &mut json), RelcorStatus::Malformed);
        relcor_program_free(other);
        relcor_spec_free(s);

        relcor_program_free(ptr::null_mut());
        relcor_spec_free(ptr::null_mut());
        relcor_string_free(ptr::null_mut());
        assert!(!CStr::from_ptr(relcor_version()).to_bytes().is_empty());
    }
}

#[test]
fn lattice_study_through_the_interface() {
    unsafe {
        let mut ok = false;
        let mut json = ptr::null_mut();
        assert_eq!(relcor_study_run(c("lattice").as_ptr(), &mut ok, &mut json), RelcorStatus::Ok);
        assert!(ok);
        assert!(take(json).contains("\"study\""));
        assert_eq!(relcor_study_run(c("nope").as_ptr(), &mut ok, &mut json), RelcorStatus::Malformed);
    }
}
