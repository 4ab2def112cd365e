//! C interface. Objects are opaque handles released with their `_free`
//! function; strings returned through out-parameters are released with
//! `relcor_string_free`. Every fallible call returns a `RelcorStatus` and
//! leaves a message for `relcor_last_error` on failure. Strings are
//! NUL-terminated UTF-8, handles must be live and out-parameters writable;
//! null arguments are reported as `RELCOR_STATUS_NULL_ARGUMENT`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::str::FromStr;

use relcor::mutation::{generate, Operator};
use relcor::relations::{competence_domain, is_correct, more_correct, Relation};
use relcor::repair::{export_tree, repair, RepairConfig, TreeFormat};
use relcor::specs::{Spec, SpecJson};
use relcor::studies::{self, Study};
use relcor::toylang::{denote, parse, Program};
use relcor::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelcorStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    InvalidSpec = 4,
    SpaceMismatch = 5,
    Capacity = 6,
    NoTests = 7,
    Io = 8,
    Malformed = 9,
    Panic = 10,
}

/// A parsed program.
pub struct RelcorProgram(Program);

/// A specification.
pub struct RelcorSpec(Spec);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RelcorStatus {
    match e {
        Error::Syntax { .. } | Error::Undeclared(_) => RelcorStatus::Syntax,
        Error::Spec(_) | Error::InvalidSpace(_) | Error::InvalidState(_) | Error::NonDeterministic(_) => {
            RelcorStatus::InvalidSpec
        }
        Error::SpaceMismatch => RelcorStatus::SpaceMismatch,
        Error::Capacity { .. } => RelcorStatus::Capacity,
        Error::EmptySuite(_) => RelcorStatus::NoTests,
        Error::Io(_) => RelcorStatus::Io,
        Error::Patch(_) | Error::Format(_) | Error::Json(_) => RelcorStatus::Malformed,
    }
}

struct Fail(RelcorStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(RelcorStatus::Malformed, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RelcorStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RelcorStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RelcorStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail(RelcorStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(RelcorStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(RelcorStatus::NullArgument, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(RelcorStatus::NullArgument, "output pointer is null".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(RelcorStatus::Malformed, "output contains NUL".into()))?;
    put(out, c.into_raw())
}

fn program_function(p: &Program, spec: &Spec) -> Result<(Relation, Relation), Fail> {
    let r = spec.enumerate()?;
    if p.space != **r.space() {
        return Err(Error::SpaceMismatch.into());
    }
    let f = denote(&p.body, r.space())?;
    Ok((r, f))
}

/// Message for the most recent failure on this thread, or null. Owned by the
/// library and valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn relcor_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn relcor_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Accepts null.
#[no_mangle]
pub unsafe extern "C" fn relcor_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn relcor_program_parse(source: *const c_char, out: *mut *mut RelcorProgram) -> RelcorStatus {
    guard(|| {
        let p = parse(text(source, "source")?)?;
        put(out, Box::into_raw(Box::new(RelcorProgram(p))))
    })
}

/// Accepts null.
#[no_mangle]
pub unsafe extern "C" fn relcor_program_free(p: *mut RelcorProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Canonical source text of `p`.
#[no_mangle]
pub unsafe extern "C" fn relcor_program_text(p: *const RelcorProgram, out: *mut *mut c_char) -> RelcorStatus {
    guard(|| put_string(out, handle(p, "program")?.0.to_string()))
}

#[no_mangle]
pub unsafe extern "C" fn relcor_spec_from_json(json: *const c_char, out: *mut *mut RelcorSpec) -> RelcorStatus {
    guard(|| {
        let doc: SpecJson = serde_json::from_str(text(json, "json")?)?;
        let spec = Spec::from_json(&doc)?;
        put(out, Box::into_raw(Box::new(RelcorSpec(spec))))
    })
}

/// Accepts null.
#[no_mangle]
pub unsafe extern "C" fn relcor_spec_free(s: *mut RelcorSpec) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Size of the competence domain of `p` with respect to `spec`, computed
/// exactly over the finite space.
#[no_mangle]
pub unsafe extern "C" fn relcor_competence_domain_size(
    spec: *const RelcorSpec,
    p: *const RelcorProgram,
    out: *mut usize,
) -> RelcorStatus {
    guard(|| {
        let (r, f) = program_function(&handle(p, "program")?.0, &handle(spec, "spec")?.0)?;
        put(out, competence_domain(&r, &f)?.len())
    })
}

#[no_mangle]
pub unsafe extern "C" fn relcor_is_correct(
    spec: *const RelcorSpec,
    p: *const RelcorProgram,
    out: *mut bool,
) -> RelcorStatus {
    guard(|| {
        let (r, f) = program_function(&handle(p, "program")?.0, &handle(spec, "spec")?.0)?;
        put(out, is_correct(&f, &r)?)
    })
}

/// Whether `candidate` is (strictly, if `strict`) more-correct than `base`.
#[no_mangle]
pub unsafe extern "C" fn relcor_more_correct(
    spec: *const RelcorSpec,
    candidate: *const RelcorProgram,
    base: *const RelcorProgram,
    strict: bool,
    out: *mut bool,
) -> RelcorStatus {
    guard(|| {
        let spec = &handle(spec, "spec")?.0;
        let (r, c) = program_function(&handle(candidate, "candidate")?.0, spec)?;
        let (_, b) = program_function(&handle(base, "base")?.0, spec)?;
        put(out, more_correct(&c, &b, &r, strict)?)
    })
}

/// Number of single-site mutants for a comma-separated operator list such
/// as `"aorb,lit,idx"`.
#[no_mangle]
pub unsafe extern "C" fn relcor_mutant_count(
    p: *const RelcorProgram,
    operators: *const c_char,
    out: *mut usize,
) -> RelcorStatus {
    guard(|| {
        let ops = Operator::parse_list(text(operators, "operators")?)?;
        put(out, generate(&handle(p, "program")?.0, &ops).len())
    })
}

/// Runs the repair search and returns the tree as JSON. `config_json` may be
/// null for the default configuration.
#[no_mangle]
pub unsafe extern "C" fn relcor_repair(
    spec: *const RelcorSpec,
    p: *const RelcorProgram,
    config_json: *const c_char,
    out: *mut *mut c_char,
) -> RelcorStatus {
    guard(|| {
        let cfg: RepairConfig = if config_json.is_null() {
            RepairConfig::default()
        } else {
            serde_json::from_str(text(config_json, "config")?)?
        };
        let res = repair(&handle(p, "program")?.0, &handle(spec, "spec")?.0, &cfg)?;
        put_string(out, export_tree(&res, TreeFormat::Json)?)
    })
}

/// Runs a bundled case study (`lattice`, `arraysum` or `fermat`) and returns
/// its report as JSON. `ok` receives whether every expected fact held.
#[no_mangle]
pub unsafe extern "C" fn relcor_study_run(name: *const c_char, ok: *mut bool, out: *mut *mut c_char) -> RelcorStatus {
    guard(|| {
        let study = Study::from_str(text(name, "name")?)?;
        let report = studies::run(study, None)?;
        put(ok, report.ok())?;
        put_string(out, serde_json::to_string_pretty(&report)?)
    })
}
