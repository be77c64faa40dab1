//! C ABI over `qbd`. Trees are opaque `QbdTree` handles; every call returns a
//! `QbdStatus` and writes results through out-pointers. Strings returned to
//! the caller are NUL-terminated JSON and must be released with
//! `qbd_string_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, size_t};
use num_rational::BigRational;
use qbd::json::{matched_to_json, matrix_to_json, read_matched, ToJson};
use qbd::matched::random_nonsingular;
use qbd::qmatrices::{
    bdq_recursive, build_e, build_full_ed, build_full_qd, build_qb, build_ql, eval_inverse_e,
    eval_inverse_qb, inverse_e_formula, inverse_qb_formula,
};
use qbd::ratfun::parse_rational;
use qbd::verify::{run_suite, SuiteOptions};
use qbd::{Error, MatchedTree};

/// Opaque handle to a nonsingular tree with its standard labeling.
pub struct QbdTree {
    inner: MatchedTree,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QbdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    NotATree = 4,
    NotNonsingular = 5,
    InvalidLabels = 6,
    InvalidVertex = 7,
    UnknownObject = 8,
    Pole = 9,
    BdqZero = 10,
    Singular = 11,
    Panic = 12,
}

impl From<&Error> for QbdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) => QbdStatus::Parse,
            Error::NotATree(_) => QbdStatus::NotATree,
            Error::NotNonsingular => QbdStatus::NotNonsingular,
            Error::InvalidLabels(_) => QbdStatus::InvalidLabels,
            Error::InvalidVertex(_) | Error::DegreeTooSmall { .. } => QbdStatus::InvalidVertex,
            Error::UnknownObject(_) => QbdStatus::UnknownObject,
            Error::PoleAtPoint { .. } | Error::DivisionByZero => QbdStatus::Pole,
            Error::BdqZero | Error::BdZero => QbdStatus::BdqZero,
            Error::SingularMatrix => QbdStatus::Singular,
            _ => QbdStatus::Parse,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

/// Run `f`, recording any error message and converting panics.
fn guard(f: impl FnOnce() -> Result<(), QbdFailure>) -> QbdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QbdStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(&fail.message);
            fail.status
        }
        Err(_) => {
            set_last_error("internal panic");
            QbdStatus::Panic
        }
    }
}

struct QbdFailure {
    status: QbdStatus,
    message: String,
}

impl QbdFailure {
    fn new(status: QbdStatus, message: impl Into<String>) -> Self {
        QbdFailure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for QbdFailure {
    fn from(e: Error) -> Self {
        QbdFailure::new((&e).into(), e.to_string())
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, QbdFailure> {
    if s.is_null() {
        return Err(QbdFailure::new(
            QbdStatus::NullPointer,
            format!("{what} is null"),
        ));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| QbdFailure::new(QbdStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn tree_ref<'a>(tree: *const QbdTree) -> Result<&'a MatchedTree, QbdFailure> {
    tree.as_ref()
        .map(|t| &t.inner)
        .ok_or_else(|| QbdFailure::new(QbdStatus::NullPointer, "tree is null"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), QbdFailure> {
    if out.is_null() {
        return Err(QbdFailure::new(
            QbdStatus::NullPointer,
            "output pointer is null",
        ));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), QbdFailure> {
    let c = CString::new(s).map_err(|_| QbdFailure::new(QbdStatus::Panic, "interior NUL"))?;
    write_out(out, c.into_raw())
}

unsafe fn optional_point(at: *const c_char) -> Result<Option<BigRational>, QbdFailure> {
    if at.is_null() {
        return Ok(None);
    }
    Ok(Some(parse_rational(read_str(at, "evaluation point")?)?))
}

/// Parse a tree document `{"edges": [[u, v], ...]}` with optional
/// `"labels"` and `"matching"`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qbd_tree_from_json(
    json: *const c_char,
    out: *mut *mut QbdTree,
) -> QbdStatus {
    guard(|| {
        let mt = read_matched(read_str(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(QbdTree { inner: mt })))
    })
}

/// Random nonsingular tree with `p` pairs, reproducible from `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qbd_tree_random(
    p: size_t,
    seed: u64,
    out: *mut *mut QbdTree,
) -> QbdStatus {
    guard(|| {
        if p == 0 {
            return Err(QbdFailure::new(
                QbdStatus::InvalidVertex,
                "p must be positive",
            ));
        }
        let mt = random_nonsingular(p, seed);
        write_out(out, Box::into_raw(Box::new(QbdTree { inner: mt })))
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `tree` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qbd_tree_free(tree: *mut QbdTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Number of matching pairs.
///
/// # Safety
/// `tree` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qbd_tree_p(tree: *const QbdTree, out: *mut size_t) -> QbdStatus {
    guard(|| write_out(out, tree_ref(tree)?.p()))
}

/// The tree with its matching and labels as JSON.
///
/// # Safety
/// `tree` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qbd_tree_to_json(
    tree: *const QbdTree,
    out: *mut *mut c_char,
) -> QbdStatus {
    guard(|| write_string(out, matched_to_json(tree_ref(tree)?).to_string()))
}

/// Matrix `name` (`qB`, `E`, `qL`, `qD` or `eD`) as matrix JSON, evaluated at
/// `at` (`"a/b"`) unless `at` is null.
///
/// # Safety
/// `tree` must be a live handle, `name` a valid string, `at` null or a valid
/// string, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qbd_matrix_json(
    tree: *const QbdTree,
    name: *const c_char,
    at: *const c_char,
    out: *mut *mut c_char,
) -> QbdStatus {
    guard(|| {
        let mt = tree_ref(tree)?;
        let m = match read_str(name, "name")? {
            "qB" => build_qb(mt),
            "E" => build_e(mt),
            "qL" => build_ql(mt),
            "qD" => build_full_qd(mt.tree()),
            "eD" => build_full_ed(mt.tree()),
            other => return Err(Error::UnknownObject(other.into()).into()),
        };
        let v = match optional_point(at)? {
            Some(q0) => matrix_to_json(&m.eval(&q0)),
            None => matrix_to_json(&m),
        };
        write_string(out, v.to_string())
    })
}

/// Closed-form inverse of `qB` or `E`, symbolic or evaluated at `at`.
/// Excluded points give `Pole` or `BdqZero`.
///
/// # Safety
/// As for [`qbd_matrix_json`].
#[no_mangle]
pub unsafe extern "C" fn qbd_inverse_json(
    tree: *const QbdTree,
    name: *const c_char,
    at: *const c_char,
    out: *mut *mut c_char,
) -> QbdStatus {
    guard(|| {
        let mt = tree_ref(tree)?;
        let name = read_str(name, "name")?;
        let at = optional_point(at)?;
        let v = match (name, &at) {
            ("E", None) => matrix_to_json(&inverse_e_formula(mt)),
            ("E", Some(q0)) => matrix_to_json(&eval_inverse_e(mt, q0)?),
            ("qB", None) => matrix_to_json(&inverse_qb_formula(mt)?),
            ("qB", Some(q0)) => matrix_to_json(&eval_inverse_qb(mt, q0)?),
            (other, _) => return Err(Error::UnknownObject(other.into()).into()),
        };
        write_string(out, v.to_string())
    })
}

/// `bd_q` as a polynomial JSON array.
///
/// # Safety
/// `tree` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qbd_bdq_json(tree: *const QbdTree, out: *mut *mut c_char) -> QbdStatus {
    guard(|| write_string(out, bdq_recursive(tree_ref(tree)?).to_json().to_string()))
}

/// Run the identity suite; writes the number of checks and of failures.
///
/// # Safety
/// `tree` must be a live handle; `checks` and `failures` writable.
#[no_mangle]
pub unsafe extern "C" fn qbd_verify(
    tree: *const QbdTree,
    checks: *mut size_t,
    failures: *mut size_t,
) -> QbdStatus {
    guard(|| {
        let report = run_suite(tree_ref(tree)?, SuiteOptions::default());
        write_out(checks, report.checks.len())?;
        write_out(failures, report.failures().count())
    })
}

/// Run the identity suite and write the report JSON.
///
/// # Safety
/// `tree` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qbd_verify_json(tree: *const QbdTree, out: *mut *mut c_char) -> QbdStatus {
    guard(|| {
        let report = run_suite(tree_ref(tree)?, SuiteOptions::default());
        write_string(
            out,
            serde_json::to_string(&report).expect("report serializes"),
        )
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qbd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn qbd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn qbd_status_str(status: QbdStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        QbdStatus::Ok => b"ok\0",
        QbdStatus::NullPointer => b"null pointer\0",
        QbdStatus::InvalidUtf8 => b"invalid UTF-8\0",
        QbdStatus::Parse => b"parse error\0",
        QbdStatus::NotATree => b"not a tree\0",
        QbdStatus::NotNonsingular => b"tree has no perfect matching\0",
        QbdStatus::InvalidLabels => b"invalid labeling\0",
        QbdStatus::InvalidVertex => b"invalid vertex or size\0",
        QbdStatus::UnknownObject => b"unknown matrix name\0",
        QbdStatus::Pole => b"excluded evaluation point\0",
        QbdStatus::BdqZero => b"bd_q vanishes\0",
        QbdStatus::Singular => b"singular matrix\0",
        QbdStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}
