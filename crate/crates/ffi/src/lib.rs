//! C ABI for the verification engine.
//!
//! Rules cross the boundary as opaque `ScfRule` handles created by
//! [`scf_rule_parse`] and released with [`scf_rule_free`]. Every fallible
//! call returns an [`ScfStatus`]; on anything but `SCF_STATUS_OK` the message
//! is available from [`scf_last_error_message`] on the same thread. Strings
//! returned by the library are released with [`scf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scf_verify::classification::{classify_all, dictatorial_profiles, ClassifyOptions};
use scf_verify::constructions::{census, verify_lemma, CensusOptions, FilterSet, LemmaId, Mode};
use scf_verify::report::{Envelope, RunConfig};
use scf_verify::{parse_rule, rules, Dims, Error, Limits, Profile, Rule};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Budget = 5,
    NotApplicable = 6,
    UnknownLemma = 7,
    VerificationFailed = 8,
    Internal = 9,
}

/// Profile counts of one rule. `manipulable` is meaningful only when
/// `tops_only` is true.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScfClassification {
    pub total: u64,
    pub manipulable: u64,
    pub dictatorial: u64,
    pub tops_only: bool,
}

/// Opaque rule handle.
pub struct ScfRule {
    rule: Rule,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> ScfStatus {
    match e {
        Error::Parse { .. } => ScfStatus::Parse,
        Error::CapExceeded { .. } | Error::BudgetExceeded { .. } => ScfStatus::Budget,
        Error::NotTopsOnly(_) | Error::NotTopsEfficient(_) => ScfStatus::NotApplicable,
        Error::UnknownLemma(_) => ScfStatus::UnknownLemma,
        Error::ClassificationConflict { .. } => ScfStatus::VerificationFailed,
        _ => ScfStatus::InvalidArgument,
    }
}

/// Runs `f`, recording the error message and mapping panics to `Internal`.
fn guard(f: impl FnOnce() -> Result<(), (ScfStatus, String)>) -> ScfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ScfStatus::Internal
        }
    }
}

fn fail(e: Error) -> (ScfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (ScfStatus, String) {
    (ScfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (ScfStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (ScfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn rule_ref<'a>(p: *const ScfRule) -> Result<&'a Rule, (ScfStatus, String)> {
    p.as_ref().map(|r| &r.rule).ok_or_else(|| null("rule"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (ScfStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn dims(agents: u32, alts: u32) -> Result<Dims, (ScfStatus, String)> {
    Dims::new(agents as usize, alts as usize).map_err(fail)
}

fn to_c_string(s: String) -> Result<*mut c_char, (ScfStatus, String)> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| (ScfStatus::Internal, "string contains NUL".into()))
}

fn mode(samples: u64, seed: u64) -> Mode {
    if samples == 0 {
        Mode::Exhaustive
    } else {
        Mode::Sampled { samples, seed }
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn scf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn scf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a rule string. `agents` and `alts` give the dimensions closed forms
/// need; pass 0 for both to rely on a table's own header.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn scf_rule_parse(
    text: *const c_char,
    agents: u32,
    alts: u32,
    out: *mut *mut ScfRule,
) -> ScfStatus {
    guard(|| {
        let s = c_str(text, "rule text")?;
        let ctx = if agents == 0 && alts == 0 {
            None
        } else {
            Some(dims(agents, alts)?)
        };
        let rule = parse_rule(s, ctx).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(ScfRule { rule })))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `rule` must come from [`scf_rule_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn scf_rule_free(rule: *mut ScfRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// # Safety
/// `rule` must be a live handle; `agents` and `alts` writable.
#[no_mangle]
pub unsafe extern "C" fn scf_rule_dims(rule: *const ScfRule, agents: *mut u32, alts: *mut u32) -> ScfStatus {
    guard(|| {
        let d = rule_ref(rule)?.dims();
        write_out(agents, d.agents as u32)?;
        write_out(alts, d.alts as u32)
    })
}

/// Canonical rule string; release with [`scf_string_free`].
///
/// # Safety
/// `rule` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scf_rule_to_string(rule: *const ScfRule, out: *mut *mut c_char) -> ScfStatus {
    guard(|| {
        let s = rule_ref(rule)?.to_string();
        write_out(out, to_c_string(s)?)
    })
}

/// Evaluates the rule at a profile written as `a,b,c|c,b,a`; the outcome is
/// an alternative index.
///
/// # Safety
/// `rule` must be a live handle, `profile` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scf_rule_evaluate(
    rule: *const ScfRule,
    profile: *const c_char,
    out: *mut u32,
) -> ScfStatus {
    guard(|| {
        let r = rule_ref(rule)?;
        let p: Profile = c_str(profile, "profile")?.parse().map_err(fail)?;
        let x = r.evaluate(&p).map_err(fail)?;
        write_out(out, x.index() as u32)
    })
}

unsafe fn predicate(rule: *const ScfRule, out: *mut bool, f: fn(&Rule) -> scf_verify::Result<bool>) -> ScfStatus {
    guard(|| {
        let v = f(rule_ref(rule)?).map_err(fail)?;
        write_out(out, v)
    })
}

/// The rule selects the common top whenever there is one.
///
/// # Safety
/// `rule` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scf_rule_is_unanimous(rule: *const ScfRule, out: *mut bool) -> ScfStatus {
    predicate(rule, out, rules::is_unanimous)
}

/// No agent ever gains by misreporting.
///
/// # Safety
/// `rule` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scf_rule_is_strategy_proof(rule: *const ScfRule, out: *mut bool) -> ScfStatus {
    predicate(rule, out, rules::is_strategy_proof)
}

/// The outcome depends only on the agents' tops.
///
/// # Safety
/// `rule` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scf_rule_is_tops_only(rule: *const ScfRule, out: *mut bool) -> ScfStatus {
    predicate(rule, out, rules::is_tops_only)
}

/// The outcome is never Pareto-dominated.
///
/// # Safety
/// `rule` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scf_rule_is_efficient(rule: *const ScfRule, out: *mut bool) -> ScfStatus {
    predicate(rule, out, rules::is_efficient)
}

/// The dictator's index, or -1 when there is none.
///
/// # Safety
/// `rule` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scf_rule_dictator(rule: *const ScfRule, out: *mut i32) -> ScfStatus {
    guard(|| {
        let d = rules::dictator(rule_ref(rule)?).map_err(fail)?;
        write_out(out, d.map_or(-1, |i| i as i32))
    })
}

/// Counts manipulable and dictatorial profiles.
///
/// # Safety
/// `rule` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scf_rule_classify(rule: *const ScfRule, out: *mut ScfClassification) -> ScfStatus {
    guard(|| {
        let r = rule_ref(rule)?;
        let total = r.dims().profile_count() as u64;
        let c = if rules::is_tops_only(r).map_err(fail)? {
            let s = classify_all(r, ClassifyOptions::default()).map_err(fail)?;
            ScfClassification {
                total,
                manipulable: s.manipulable,
                dictatorial: s.dictatorial,
                tops_only: true,
            }
        } else {
            ScfClassification {
                total,
                manipulable: 0,
                dictatorial: dictatorial_profiles(r).map_err(fail)?.count_ones(..) as u64,
                tops_only: false,
            }
        };
        write_out(out, c)
    })
}

fn config(command: &str, agents: u32, alts: u32, mode: Mode) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        agents: Some(agents as usize),
        alts: Some(alts as usize),
        rule: None,
        filters: Vec::new(),
        mode: Some(mode),
        workers: None,
        limits: *Limits::current(),
    }
}

macro_rules! envelope_json {
    ($cfg:expr, $value:expr) => {{
        let mut buf = Vec::new();
        Envelope::new($cfg, $value).write_json(&mut buf).map_err(fail)?;
        String::from_utf8(buf).map_err(|_| (ScfStatus::Internal, "report is not UTF-8".to_string()))?
    }};
}

/// Census report as JSON. `samples == 0` means exhaustive. `holds` receives
/// whether the strategy-proof efficient rules are exactly the dictatorships.
///
/// # Safety
/// `out` and `holds` must be writable; release `*out` with [`scf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn scf_census_json(
    agents: u32,
    alts: u32,
    samples: u64,
    seed: u64,
    out: *mut *mut c_char,
    holds: *mut bool,
) -> ScfStatus {
    guard(|| {
        if out.is_null() || holds.is_null() {
            return Err(null("output pointer"));
        }
        let m = mode(samples, seed);
        let report = census(dims(agents, alts)?, m, &FilterSet::none(), CensusOptions::default()).map_err(fail)?;
        let json = envelope_json!(&config("census", agents, alts, m), &report);
        write_out(holds, report.theorem_holds)?;
        write_out(out, to_c_string(json)?)
    })
}

/// One check (`L1`, `L3`, `L4`, `L5`, `C1`, `C2`, `R1`, `R2`, `THM`) as JSON.
/// `samples == 0` means exhaustive.
///
/// # Safety
/// `id` must be NUL-terminated; `out` and `passed` writable; release `*out`
/// with [`scf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn scf_verify_lemma_json(
    id: *const c_char,
    agents: u32,
    alts: u32,
    samples: u64,
    seed: u64,
    out: *mut *mut c_char,
    passed: *mut bool,
) -> ScfStatus {
    guard(|| {
        if out.is_null() || passed.is_null() {
            return Err(null("output pointer"));
        }
        let lemma: LemmaId = c_str(id, "lemma id")?.parse().map_err(fail)?;
        let m = mode(samples, seed);
        let report = verify_lemma(lemma, dims(agents, alts)?, m).map_err(fail)?;
        let json = envelope_json!(&config("lemmas", agents, alts, m), &[&report]);
        write_out(passed, report.passed())?;
        write_out(out, to_c_string(json)?)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn scf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
