use std::ffi::{CStr, CString};
use std::ptr;

use dlm_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = dlm_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    dlm_string_free(s);
    out
}

#[test]
fn french_drop_through_the_c_interface() {
    unsafe {
        let mut init = ptr::null_mut();
        assert_eq!(dlm_french_drop(&mut init), DlmStatus::Ok);
        assert_eq!(dlm_model_world_count(init), 3);
        assert!(dlm_last_error().is_null());

        let mut mid = ptr::null_mut();
        assert_eq!(dlm_update(init, c("show-(a, r & ~l)").as_ptr(), false, &mut mid), DlmStatus::Ok);
        assert_eq!(dlm_model_world_count(mid), 4);
        let mut end = ptr::null_mut();
        assert_eq!(dlm_update(mid, c("show+(a, l & ~r)").as_ptr(), false, &mut end), DlmStatus::Ok);
        assert_eq!(dlm_model_world_count(end), 2);
        assert_eq!(dlm_check(end, c("O(b,l) & O(b,~r)").as_ptr()), DlmStatus::Ok);
        assert_eq!(dlm_check(end, c("obs(b,r)").as_ptr()), DlmStatus::False);

        let mut bad = ptr::null_mut();
        assert_eq!(dlm_update(init, c("show+(a, r)").as_ptr(), false, &mut bad), DlmStatus::NotExecutable);
        assert!(bad.is_null());
        assert!(last_error().contains("not executable"));
        assert_eq!(dlm_update(init, c("show+(a, r)").as_ptr(), true, &mut bad), DlmStatus::Ok);
        assert_eq!(dlm_model_world_count(bad), 2);

        for m in [init, mid, end, bad] {
            dlm_model_free(m);
        }
    }
}

#[test]
fn json_and_dot_round_trip() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(dlm_french_drop(&mut m), DlmStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(dlm_model_to_json(m, &mut json), DlmStatus::Ok);
        let text = take(json);
        let mut back = ptr::null_mut();
        let ct = c(&text);
        assert_eq!(dlm_model_from_json(ct.as_ptr(), &mut back), DlmStatus::Ok);
        let mut json2 = ptr::null_mut();
        assert_eq!(dlm_model_to_json(back, &mut json2), DlmStatus::Ok);
        assert_eq!(take(json2), text);

        let mut dot = ptr::null_mut();
        assert_eq!(dlm_model_to_dot(back, &mut dot), DlmStatus::Ok);
        assert!(take(dot).contains("doublecircle"));
        dlm_model_free(m);
        dlm_model_free(back);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(dlm_model_from_json(c("{").as_ptr(), &mut m), DlmStatus::Invalid);
        assert!(m.is_null());
        assert!(last_error().contains("document"));
        assert_eq!(dlm_model_from_json(ptr::null(), &mut m), DlmStatus::NullArgument);
        assert_eq!(dlm_check(ptr::null(), c("p").as_ptr()), DlmStatus::NullArgument);

        let unpointed = r#"{"agents":["a"],"props":["p"],"worlds":["w"],"relations":{"a":[["w","w"]]}}"#;
        assert_eq!(dlm_model_from_json(c(unpointed).as_ptr(), &mut m), DlmStatus::Ok);
        assert_eq!(dlm_check(m, c("p").as_ptr()), DlmStatus::Invalid);
        assert_eq!(dlm_check(m, c("p &").as_ptr()), DlmStatus::ParseError);
        dlm_model_free(m);
        dlm_model_free(ptr::null_mut());
        dlm_string_free(ptr::null_mut());
        assert_eq!(dlm_model_world_count(ptr::null()), 0);
    }
}

#[test]
fn translate_and_verify() {
    unsafe {
        let mut out = ptr::null_mut();
        let status =
            dlm_translate(c("[tell+(a,p)] q").as_ptr(), c("a,b").as_ptr(), c("p,q").as_ptr(), &mut out);
        assert_eq!(status, DlmStatus::Ok);
        assert_eq!(take(out), "(B[a](p) -> q)");

        let (agents, props) = (c("a,b"), c("p"));
        let valid = c("B[a] p -> B[a] B[a] p");
        let status = dlm_verify(
            valid.as_ptr(),
            agents.as_ptr(),
            props.as_ptr(),
            3,
            DlmFrameClass::Observational,
            ptr::null_mut(),
        );
        assert_eq!(status, DlmStatus::Ok);

        let mut cm = ptr::null_mut();
        let status = dlm_verify(
            c("B[a] p -> p").as_ptr(),
            agents.as_ptr(),
            props.as_ptr(),
            2,
            DlmFrameClass::Observational,
            &mut cm,
        );
        assert_eq!(status, DlmStatus::False);
        assert_eq!(dlm_check(cm, c("B[a] p & ~p").as_ptr()), DlmStatus::Ok);
        dlm_model_free(cm);

        let status = dlm_verify(
            c("p").as_ptr(),
            agents.as_ptr(),
            props.as_ptr(),
            9,
            DlmFrameClass::All,
            ptr::null_mut(),
        );
        assert_eq!(status, DlmStatus::Invalid);
    }
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(dlm_model_from_json(c("[]").as_ptr(), &mut m), DlmStatus::Invalid);
    }
    let other = std::thread::spawn(|| dlm_last_error().is_null()).join().unwrap();
    assert!(other);
    assert!(!dlm_last_error().is_null());
}
