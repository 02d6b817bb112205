use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use scf_verify_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn parse(text: &str, agents: u32, alts: u32) -> (ScfStatus, *mut ScfRule) {
    let mut out = ptr::null_mut();
    let status = unsafe { scf_rule_parse(c(text).as_ptr(), agents, alts, &mut out) };
    (status, out)
}

fn last_error() -> String {
    let p = scf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn dictator_round_trip() {
    let (status, rule) = parse("DICT:0", 2, 3);
    assert_eq!(status, ScfStatus::Ok);
    unsafe {
        let mut text = ptr::null_mut();
        assert_eq!(scf_rule_to_string(rule, &mut text), ScfStatus::Ok);
        assert_eq!(CStr::from_ptr(text).to_str().unwrap(), "DICT:0");
        scf_string_free(text);

        let (mut n, mut m) = (0, 0);
        assert_eq!(scf_rule_dims(rule, &mut n, &mut m), ScfStatus::Ok);
        assert_eq!((n, m), (2, 3));

        for f in [
            scf_rule_is_unanimous,
            scf_rule_is_strategy_proof,
            scf_rule_is_tops_only,
            scf_rule_is_efficient,
        ] {
            let mut v = false;
            assert_eq!(f(rule, &mut v), ScfStatus::Ok);
            assert!(v);
        }
        let mut d = -1;
        assert_eq!(scf_rule_dictator(rule, &mut d), ScfStatus::Ok);
        assert_eq!(d, 0);

        let mut cls = ScfClassification::default();
        assert_eq!(scf_rule_classify(rule, &mut cls), ScfStatus::Ok);
        assert_eq!(
            cls,
            ScfClassification {
                total: 36,
                manipulable: 0,
                dictatorial: 36,
                tops_only: true
            }
        );
        scf_rule_free(rule);
    }
}

#[test]
fn borda_is_not_tops_only() {
    let (status, rule) = parse("BORDALEX", 2, 3);
    assert_eq!(status, ScfStatus::Ok);
    unsafe {
        let mut v = true;
        assert_eq!(scf_rule_is_tops_only(rule, &mut v), ScfStatus::Ok);
        assert!(!v);
        assert_eq!(scf_rule_is_strategy_proof(rule, &mut v), ScfStatus::Ok);
        assert!(!v);
        let mut d = 0;
        assert_eq!(scf_rule_dictator(rule, &mut d), ScfStatus::Ok);
        assert_eq!(d, -1);
        let mut cls = ScfClassification::default();
        assert_eq!(scf_rule_classify(rule, &mut cls), ScfStatus::Ok);
        assert!(!cls.tops_only);
        scf_rule_free(rule);
    }
}

#[test]
fn error_codes() {
    let (status, rule) = parse("DICT:x", 2, 3);
    assert_eq!(status, ScfStatus::Parse);
    assert!(rule.is_null());
    assert!(last_error().contains("position 5"), "{}", last_error());

    assert_eq!(parse("DICT:0", 2, 11).0, ScfStatus::InvalidArgument);
    assert_eq!(parse("TOPS:n=2,m=3:000111222", 3, 3).0, ScfStatus::Parse);

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { scf_rule_parse(ptr::null(), 2, 3, &mut out) },
        ScfStatus::NullPointer
    );
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { scf_rule_parse(bad.as_ptr().cast(), 2, 3, &mut out) },
        ScfStatus::InvalidUtf8
    );

    let mut v = false;
    assert_eq!(unsafe { scf_rule_is_unanimous(ptr::null(), &mut v) }, ScfStatus::NullPointer);

    let (_, rule) = parse("DICT:0", 2, 3);
    let mut x = 0;
    unsafe {
        assert_eq!(scf_rule_evaluate(rule, c("a,b|a,b").as_ptr(), &mut x), ScfStatus::InvalidArgument);
        assert_eq!(scf_rule_evaluate(rule, c("c,a,b|a,b,c").as_ptr(), &mut x), ScfStatus::Ok);
        assert_eq!(x, 2);
        scf_rule_free(rule);
    }

    let mut json = ptr::null_mut();
    let mut holds = false;
    assert_eq!(
        unsafe { scf_census_json(2, 4, 0, 0, &mut json, &mut holds) },
        ScfStatus::Budget
    );
    let mut passed = false;
    assert_eq!(
        unsafe { scf_verify_lemma_json(c("L9").as_ptr(), 2, 3, 0, 0, &mut json, &mut passed) },
        ScfStatus::UnknownLemma
    );
}

#[test]
fn reports_are_deterministic() {
    let run = || unsafe {
        let mut json = ptr::null_mut();
        let mut holds = false;
        assert_eq!(scf_census_json(3, 3, 3000, 11, &mut json, &mut holds), ScfStatus::Ok);
        assert!(holds);
        let s = CStr::from_ptr(json).to_str().unwrap().to_owned();
        scf_string_free(json);
        s
    };
    assert_eq!(run(), run());
}

#[test]
fn lemma_json() {
    unsafe {
        let mut json = ptr::null_mut();
        let mut passed = false;
        assert_eq!(
            scf_verify_lemma_json(c("L4").as_ptr(), 2, 3, 0, 0, &mut json, &mut passed),
            ScfStatus::Ok
        );
        assert!(passed);
        let s = CStr::from_ptr(json).to_str().unwrap();
        assert!(s.contains("\"lemma\": \"L4\""));
        assert!(s.contains("\"schema_version\": 1"));
        scf_string_free(json);
    }
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn have(tool: &str) -> bool {
    Command::new(tool).arg("--version").output().is_ok()
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = target_dir().join("libscf_verify_ffi.a");
    if !have("cc") || !lib.exists() {
        eprintln!("skipping: cc or {} not available", lib.display());
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "compiling the C smoke test failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
