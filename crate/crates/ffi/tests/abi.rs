use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use libc::{c_char, size_t};
use qbd_ffi::*;
use serde_json::{json, Value};

const P4: &str = r#"{"edges": [[0,1],[0,2],[2,3]]}"#;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn load(doc: &str) -> *mut QbdTree {
    let mut t = ptr::null_mut();
    let s = cstr(doc);
    assert_eq!(
        unsafe { qbd_tree_from_json(s.as_ptr(), &mut t) },
        QbdStatus::Ok
    );
    t
}

fn take(s: *mut c_char) -> Value {
    let v = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { qbd_string_free(s) };
    v
}

fn last_error() -> String {
    let p = qbd_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn laplacian_of_p4() {
    let t = load(P4);
    let mut out = ptr::null_mut();
    let name = cstr("qL");
    assert_eq!(
        unsafe { qbd_matrix_json(t, name.as_ptr(), ptr::null(), &mut out) },
        QbdStatus::Ok
    );
    assert_eq!(
        take(out)["entries"],
        json!([[["1"], ["-1"]], [["0", "0", "-1"], ["1"]]])
    );
    let mut p: size_t = 0;
    assert_eq!(unsafe { qbd_tree_p(t, &mut p) }, QbdStatus::Ok);
    assert_eq!(p, 2);
    unsafe { qbd_tree_free(t) };
}

#[test]
fn evaluated_matrix() {
    let t = load(P4);
    let (name, at) = (cstr("E"), cstr("1"));
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { qbd_matrix_json(t, name.as_ptr(), at.as_ptr(), &mut out) },
        QbdStatus::Ok
    );
    assert_eq!(take(out)["entries"], json!([["1", "1"], ["1", "1"]]));
    unsafe { qbd_tree_free(t) };
}

#[test]
fn bdq_of_p6() {
    let t = load(r#"{"edges": [[0,1],[1,2],[2,3],[3,4],[4,5]]}"#);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { qbd_bdq_json(t, &mut out) }, QbdStatus::Ok);
    assert_eq!(take(out), json!(["2", "1"]));
    unsafe { qbd_tree_free(t) };
}

#[test]
fn inverse_and_exclusions() {
    let t = load(r#"{"edges": [[0,1]]}"#);
    let e = cstr("E");
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { qbd_inverse_json(t, e.as_ptr(), ptr::null(), &mut out) },
        QbdStatus::Ok
    );
    assert_eq!(
        take(out)["entries"],
        json!([[{"num": ["1"], "den": ["0", "1"]}]])
    );
    let one = cstr("1");
    out = ptr::null_mut();
    assert_eq!(
        unsafe { qbd_inverse_json(t, e.as_ptr(), one.as_ptr(), &mut out) },
        QbdStatus::Pole
    );
    assert!(out.is_null());
    let (qb, minus) = (cstr("qB"), cstr("-1"));
    assert_eq!(
        unsafe { qbd_inverse_json(t, qb.as_ptr(), minus.as_ptr(), &mut out) },
        QbdStatus::Pole
    );
    assert!(last_error().contains("-1"));
    let half = cstr("1/2");
    assert_eq!(
        unsafe { qbd_inverse_json(t, qb.as_ptr(), half.as_ptr(), &mut out) },
        QbdStatus::Ok
    );
    assert_eq!(take(out)["entries"], json!([["1"]]));
    unsafe { qbd_tree_free(t) };
}

#[test]
fn verify_counts() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { qbd_tree_random(5, 7, &mut t) }, QbdStatus::Ok);
    let (mut checks, mut failures): (size_t, size_t) = (0, 0);
    assert_eq!(
        unsafe { qbd_verify(t, &mut checks, &mut failures) },
        QbdStatus::Ok
    );
    assert!(checks >= 12);
    assert_eq!(failures, 0);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { qbd_verify_json(t, &mut out) }, QbdStatus::Ok);
    let report = take(out);
    assert_eq!(report["p"], json!(5));
    assert_eq!(report["checks"].as_array().unwrap().len(), checks);
    unsafe { qbd_tree_free(t) };
}

#[test]
fn random_is_reproducible() {
    let dump = |seed| {
        let mut t = ptr::null_mut();
        assert_eq!(unsafe { qbd_tree_random(6, seed, &mut t) }, QbdStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { qbd_tree_to_json(t, &mut out) }, QbdStatus::Ok);
        unsafe { qbd_tree_free(t) };
        take(out)
    };
    assert_eq!(dump(3), dump(3));
}

#[test]
fn error_statuses() {
    let mut t = ptr::null_mut();
    let star = cstr(r#"{"edges": [[0,1],[0,2],[0,3]]}"#);
    assert_eq!(
        unsafe { qbd_tree_from_json(star.as_ptr(), &mut t) },
        QbdStatus::NotNonsingular
    );
    assert!(t.is_null());
    assert!(last_error().contains("NotNonsingular"));
    let junk = cstr("{");
    assert_eq!(
        unsafe { qbd_tree_from_json(junk.as_ptr(), &mut t) },
        QbdStatus::Parse
    );
    let cycle = cstr(r#"{"edges": [[0,1],[1,2],[0,2]]}"#);
    assert_eq!(
        unsafe { qbd_tree_from_json(cycle.as_ptr(), &mut t) },
        QbdStatus::NotATree
    );
    assert_eq!(
        unsafe { qbd_tree_from_json(ptr::null(), &mut t) },
        QbdStatus::NullPointer
    );
    assert_eq!(
        unsafe { qbd_tree_random(0, 1, &mut t) },
        QbdStatus::InvalidVertex
    );

    let p4 = load(P4);
    let bad = cstr("zz");
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { qbd_matrix_json(p4, bad.as_ptr(), ptr::null(), &mut out) },
        QbdStatus::UnknownObject
    );
    let name = cstr("qB");
    assert_eq!(
        unsafe { qbd_matrix_json(p4, name.as_ptr(), bad.as_ptr(), &mut out) },
        QbdStatus::Parse
    );
    assert_eq!(
        unsafe { qbd_matrix_json(p4, name.as_ptr(), ptr::null(), ptr::null_mut()) },
        QbdStatus::NullPointer
    );
    assert_eq!(
        unsafe { qbd_tree_p(ptr::null(), ptr::null_mut()) },
        QbdStatus::NullPointer
    );
    unsafe {
        qbd_tree_free(p4);
        qbd_tree_free(ptr::null_mut());
        qbd_string_free(ptr::null_mut());
    }
}

#[test]
fn status_strings() {
    let s = unsafe { CStr::from_ptr(qbd_status_str(QbdStatus::Pole)) };
    assert_eq!(s.to_str().unwrap(), "excluded evaluation point");
    let s = unsafe { CStr::from_ptr(qbd_status_str(QbdStatus::Ok)) };
    assert_eq!(s.to_str().unwrap(), "ok");
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = format!("{dir}/include/qbd.h");
    let src = std::env::temp_dir().join(format!("qbd_header_{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"qbd.h\"\n\
         int main(void) {\n\
           QbdTree *t = 0;\n\
           QbdStatus s = qbd_tree_random(3, 1, &t);\n\
           size_t p = 0;\n\
           if (s == QBD_STATUS_OK) { qbd_tree_p(t, &p); qbd_tree_free(t); }\n\
           return (int)p;\n\
         }\n",
    )
    .unwrap();
    assert!(std::path::Path::new(&header).exists());
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(format!("{dir}/include"))
        .arg(&src)
        .status();
    let _ = std::fs::remove_file(&src);
    match status {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(e) => eprintln!("cc unavailable, header compile skipped: {e}"),
    }
}
