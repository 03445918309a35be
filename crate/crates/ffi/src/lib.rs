//! C ABI over `sol2eb`.
//!
//! Every function returns a [`Sol2ebStatus`]; on failure a message is
//! available from [`sol2eb_last_error`] on the same thread. Strings returned
//! through `out` pointers are owned by the caller and released with
//! [`sol2eb_string_free`]; handles are released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use serde_json::{Map, Value as Json};
use sol2eb::checker::{check_all, CheckOptions, DEFAULT_BUDGET};
use sol2eb::eb::Bounds;
use sol2eb::ebtext::{parse_project, print_project};
use sol2eb::project::{load, translate_source, LoadedProject};
use sol2eb::sim::{decode_constants, SimError, SimSession};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sol2ebStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    /// Solidity, `.eb` or I/O input could not be loaded.
    InputError = 4,
    TypeError = 5,
    GuardFailed = 6,
    EventError = 7,
    SimulationError = 8,
    Panic = 9,
}

/// A loaded Event-B project with its optional translation report.
pub struct Sol2ebProject {
    inner: LoadedProject,
}

/// An animation session over one machine.
pub struct Sol2ebSession {
    inner: SimSession,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl std::fmt::Display) {
    let c = CString::new(msg.to_string().replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(Sol2ebStatus, String);

impl Failure {
    fn new(status: Sol2ebStatus, msg: impl std::fmt::Display) -> Self {
        Failure(status, msg.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let status = match e {
            SimError::GuardFailed(_) => Sol2ebStatus::GuardFailed,
            SimError::EventError(_) => Sol2ebStatus::EventError,
            SimError::Type(_) => Sol2ebStatus::TypeError,
            SimError::BadParams(_) | SimError::UnknownEvent(_) | SimError::UnknownMachine(_) | SimError::UnknownConstant(_) => {
                Sol2ebStatus::InvalidArgument
            }
            _ => Sol2ebStatus::SimulationError,
        };
        Failure::new(status, e)
    }
}

type R<T> = Result<T, Failure>;

fn guard(f: impl FnOnce() -> R<()>) -> Sol2ebStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            Sol2ebStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            Sol2ebStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> R<&'a str> {
    if p.is_null() {
        return Err(Failure::new(Sol2ebStatus::NullPointer, format!("`{what}` is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::new(Sol2ebStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> R<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn json_object(p: *const c_char, what: &str) -> R<Map<String, Json>> {
    match opt_str_arg(p, what)? {
        None => Ok(Map::new()),
        Some(s) => match serde_json::from_str(s) {
            Ok(Json::Object(m)) => Ok(m),
            _ => Err(Failure::new(Sol2ebStatus::InvalidArgument, format!("`{what}` is not a JSON object"))),
        },
    }
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> R<&'a mut T> {
    p.as_mut().ok_or_else(|| Failure::new(Sol2ebStatus::NullPointer, format!("`{what}` is null")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> R<&'a T> {
    p.as_ref().ok_or_else(|| Failure::new(Sol2ebStatus::NullPointer, format!("`{what}` is null")))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> R<&'a mut T> {
    p.as_mut().ok_or_else(|| Failure::new(Sol2ebStatus::NullPointer, format!("`{what}` is null")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> R<()> {
    let slot = out_ptr(out, "out")?;
    *slot = CString::new(s).map_err(|e| Failure::new(Sol2ebStatus::InvalidArgument, e))?.into_raw();
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, j: &Json) -> R<()> {
    write_string(out, serde_json::to_string(j).expect("json serializes"))
}

fn bounds(addr: u32, int_lo: i64, int_hi: i64) -> R<Bounds> {
    Bounds::new(addr, int_lo.into(), int_hi.into()).map_err(|e| Failure::new(Sol2ebStatus::InvalidArgument, e))
}

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure::new(Sol2ebStatus::InputError, e)
}

/// Message of the last failure on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sol2eb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sol2eb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Translates Solidity `source`; `file_name` labels source spans.
///
/// # Safety
/// Pointers must be valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_project_from_solidity(
    file_name: *const c_char,
    source: *const c_char,
    out: *mut *mut Sol2ebProject,
) -> Sol2ebStatus {
    guard(|| {
        let file = str_arg(file_name, "file_name")?;
        let text = str_arg(source, "source")?;
        let out = out_ptr(out, "out")?;
        let inner = translate_source(file, text).map_err(input_error)?;
        *out = Box::into_raw(Box::new(Sol2ebProject { inner }));
        Ok(())
    })
}

/// Parses `count` `.eb` texts into a project called `name`.
///
/// # Safety
/// `file_names` and `texts` must each point to `count` valid strings.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_project_from_eb(
    name: *const c_char,
    file_names: *const *const c_char,
    texts: *const *const c_char,
    count: usize,
    out: *mut *mut Sol2ebProject,
) -> Sol2ebStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        if count > 0 && (file_names.is_null() || texts.is_null()) {
            return Err(Failure::new(Sol2ebStatus::NullPointer, "`file_names` or `texts` is null"));
        }
        let out = out_ptr(out, "out")?;
        let mut files = Vec::with_capacity(count);
        for i in 0..count {
            files.push((
                str_arg(*file_names.add(i), "file_names[i]")?.to_string(),
                str_arg(*texts.add(i), "texts[i]")?.to_string(),
            ));
        }
        let project = parse_project(name, &files).map_err(input_error)?;
        *out = Box::into_raw(Box::new(Sol2ebProject { inner: LoadedProject { project, report: None } }));
        Ok(())
    })
}

/// Loads a `.sol` file or a directory of `.eb` files.
///
/// # Safety
/// `path` must be a valid string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_project_load(path: *const c_char, out: *mut *mut Sol2ebProject) -> Sol2ebStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let out = out_ptr(out, "out")?;
        let inner = load(Path::new(path)).map_err(input_error)?;
        *out = Box::into_raw(Box::new(Sol2ebProject { inner }));
        Ok(())
    })
}

/// # Safety
/// `project` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_project_free(project: *mut Sol2ebProject) {
    if !project.is_null() {
        drop(Box::from_raw(project));
    }
}

/// Canonical `.eb` text as a JSON array of `{"file", "text"}` objects.
///
/// # Safety
/// `project` must be live; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_project_print(project: *const Sol2ebProject, out_json: *mut *mut c_char) -> Sol2ebStatus {
    guard(|| {
        let p = handle(project, "project")?;
        let files: Vec<Json> = print_project(&p.inner.project)
            .into_iter()
            .map(|(file, text)| serde_json::json!({ "file": file, "text": text }))
            .collect();
        write_json(out_json, &Json::Array(files))
    })
}

/// Checks every proof obligation and writes the JSON report. `violated`, if
/// not null, receives the number of violated or unsupported obligations.
///
/// # Safety
/// `project` must be live; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_project_check(
    project: *const Sol2ebProject,
    addr: u32,
    int_lo: i64,
    int_hi: i64,
    all: bool,
    out_json: *mut *mut c_char,
    violated: *mut usize,
) -> Sol2ebStatus {
    guard(|| {
        let p = handle(project, "project")?;
        let opts = CheckOptions { bounds: bounds(addr, int_lo, int_hi)?, budget: DEFAULT_BUDGET, all };
        let report =
            check_all(&p.inner.project, &opts, p.inner.report.as_ref()).map_err(|e| Failure::new(Sol2ebStatus::TypeError, e))?;
        if let Some(v) = violated.as_mut() {
            *v = report.violated().count() + report.unsupported().count();
        }
        write_string(out_json, report.to_json())
    })
}

/// Starts a session. `machine` may be null for the most concrete machine;
/// `constants_json` may be null or a JSON object of fixed constants.
///
/// # Safety
/// `project` must be live; string arguments valid or null where allowed.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_session_new(
    project: *const Sol2ebProject,
    machine: *const c_char,
    constants_json: *const c_char,
    addr: u32,
    int_lo: i64,
    int_hi: i64,
    out: *mut *mut Sol2ebSession,
) -> Sol2ebStatus {
    guard(|| {
        let p = handle(project, "project")?;
        let machine = opt_str_arg(machine, "machine")?;
        let consts = json_object(constants_json, "constants_json")?;
        let out = out_ptr(out, "out")?;
        let b = bounds(addr, int_lo, int_hi)?;
        let fixed = decode_constants(&p.inner.project, machine, &consts, &b)?;
        let inner = SimSession::new(&p.inner.project, machine, &fixed, b)?;
        *out = Box::into_raw(Box::new(Sol2ebSession { inner }));
        Ok(())
    })
}

/// # Safety
/// `session` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_session_free(session: *mut Sol2ebSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// `{variables, previous, constants, invariants, step}` as JSON.
///
/// # Safety
/// `session` must be live; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_session_state(session: *const Sol2ebSession, out_json: *mut *mut c_char) -> Sol2ebStatus {
    guard(|| write_json(out_json, &handle(session, "session")?.inner.state_json()))
}

/// Enabled events with their parameter offers as a JSON array.
///
/// # Safety
/// `session` must be live; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_session_events(session: *const Sol2ebSession, out_json: *mut *mut c_char) -> Sol2ebStatus {
    guard(|| {
        let offers = handle(session, "session")?.inner.enabled_events()?;
        write_json(out_json, &Json::Array(offers.iter().map(|o| o.to_json()).collect()))
    })
}

/// Fires `event` with `params_json` (a JSON object, or null when the event
/// has no parameters) and writes the step result.
///
/// # Safety
/// `session` must be live; strings valid; `out_json` writable or null.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_session_fire(
    session: *mut Sol2ebSession,
    event: *const c_char,
    params_json: *const c_char,
    out_json: *mut *mut c_char,
) -> Sol2ebStatus {
    guard(|| {
        let s = handle_mut(session, "session")?;
        let event = str_arg(event, "event")?;
        let params = json_object(params_json, "params_json")?;
        let params = s.inner.parse_params(event, &params)?;
        let r = s.inner.fire(event, &params)?;
        if out_json.is_null() {
            Ok(())
        } else {
            write_json(out_json, &r.to_json())
        }
    })
}

/// # Safety
/// `session` must be live.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_session_undo(session: *mut Sol2ebSession) -> Sol2ebStatus {
    guard(|| {
        handle_mut(session, "session")?.inner.undo()?;
        Ok(())
    })
}

/// # Safety
/// `session` must be live.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_session_reset(session: *mut Sol2ebSession) -> Sol2ebStatus {
    guard(|| {
        handle_mut(session, "session")?.inner.reset();
        Ok(())
    })
}

/// The trace document as JSON.
///
/// # Safety
/// `session` must be live; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sol2eb_session_trace(session: *const Sol2ebSession, out_json: *mut *mut c_char) -> Sol2ebStatus {
    guard(|| write_json(out_json, &handle(session, "session")?.inner.trace_json()))
}
