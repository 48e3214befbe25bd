//! C interface to extbayes.
//!
//! Scenarios are opaque handles created by [`eb_scenario_parse`] and released
//! with [`eb_scenario_free`]. Commands write a newly allocated JSON report to
//! `*out_json`, to be released with [`eb_string_free`], and return an
//! [`EbStatus`]. On any status other than `EB_STATUS_OK` and
//! `EB_STATUS_FAILS` no report is written and [`eb_last_error`] describes the
//! problem.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use extbayes::commands::{self, exit, Outcome};
use extbayes::report;
use extbayes::scenario::Scenario;
use extbayes::Error;

/// Result codes. The first four match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbStatus {
    /// The property holds.
    Ok = 0,
    /// The property fails; the report carries the violation.
    Fails = 1,
    InputError = 2,
    ResourceCap = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// Opaque scenario handle.
pub struct EbScenario {
    inner: Scenario,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(err: &Error) -> EbStatus {
    set_error(&err.to_string());
    match commands::error_code(err) {
        exit::RESOURCE_CAP => EbStatus::ResourceCap,
        _ => EbStatus::InputError,
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, EbStatus> {
    if p.is_null() {
        set_error("null pointer argument");
        return Err(EbStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        EbStatus::InvalidUtf8
    })
}

fn guarded(f: impl FnOnce() -> EbStatus) -> EbStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        EbStatus::Panic
    })
}

unsafe fn run(
    scenario: *const EbScenario,
    out_json: *mut *mut c_char,
    command: impl FnOnce(&Scenario) -> extbayes::Result<Outcome>,
) -> EbStatus {
    guarded(|| {
        if scenario.is_null() || out_json.is_null() {
            set_error("null pointer argument");
            return EbStatus::NullPointer;
        }
        *out_json = ptr::null_mut();
        match command(&(*scenario).inner) {
            Ok(outcome) => {
                let text = report::to_json(&outcome.report);
                *out_json = CString::new(text).expect("JSON has no nul").into_raw();
                if outcome.holds {
                    EbStatus::Ok
                } else {
                    EbStatus::Fails
                }
            }
            Err(e) => fail(&e),
        }
    })
}

/// Parses a scenario from JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eb_scenario_parse(json: *const c_char, out: *mut *mut EbScenario) -> EbStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null pointer argument");
            return EbStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match Scenario::from_json(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(EbScenario { inner }));
                EbStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `scenario` must come from [`eb_scenario_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn eb_scenario_free(scenario: *mut EbScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of periods in the scenario, or 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eb_scenario_periods(scenario: *const EbScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.inner.measures.len())
}

/// # Safety
/// `scenario` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eb_check(scenario: *const EbScenario, out_json: *mut *mut c_char) -> EbStatus {
    run(scenario, out_json, commands::check)
}

/// # Safety
/// `scenario` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eb_witness(scenario: *const EbScenario, out_json: *mut *mut c_char) -> EbStatus {
    run(scenario, out_json, commands::witness)
}

/// # Safety
/// `scenario` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eb_chain(scenario: *const EbScenario, out_json: *mut *mut c_char) -> EbStatus {
    run(scenario, out_json, commands::chain)
}

/// # Safety
/// `scenario` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eb_prefs(scenario: *const EbScenario, out_json: *mut *mut c_char) -> EbStatus {
    run(scenario, out_json, commands::prefs)
}

/// # Safety
/// `scenario` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eb_compile(scenario: *const EbScenario, out_json: *mut *mut c_char) -> EbStatus {
    run(scenario, out_json, commands::compile)
}

/// Conditional bounds of `target` given `given`. Events are formulas for
/// propositional scenarios, otherwise comma-separated state names. A
/// `vertex_cap` of 0 selects the default.
///
/// # Safety
/// `scenario` must be a live handle, `given` and `target` nul-terminated
/// strings, and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eb_bounds(
    scenario: *const EbScenario,
    given: *const c_char,
    target: *const c_char,
    vertex_cap: u64,
    out_json: *mut *mut c_char,
) -> EbStatus {
    if !out_json.is_null() {
        *out_json = ptr::null_mut();
    }
    let (given, target) = match (read_str(given), read_str(target)) {
        (Ok(g), Ok(t)) => (g, t),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    let cap = (vertex_cap > 0).then_some(vertex_cap);
    run(scenario, out_json, |s| commands::bounds(s, given, target, cap))
}

/// Message for the last error on this thread. Valid until the next call into
/// this library from the same thread.
#[no_mangle]
pub extern "C" fn eb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a report string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn eb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn eb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
