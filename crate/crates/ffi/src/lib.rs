//! C interface to the `dlm` model checker.
//!
//! Models live behind the opaque `DlmModel` handle. Every fallible call
//! returns a [`DlmStatus`]; on failure a message is available from
//! [`dlm_last_error`] until the next call on the same thread. Strings handed
//! out by the library are released with [`dlm_string_free`].
//!
//! Pointer arguments must be null or valid: strings NUL-terminated, handles
//! obtained from this library and not yet freed, out-parameters writable.
//! Null is reported as `NullArgument` rather than dereferenced.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dlm::explorer::{self, Bounds, FrameClass, Verdict};
use dlm::{dot, io, kripke, reduce, scenario, update, Error, Model, PointedModel, Registry};

/// Result codes. Values 0 to 5 match the exit codes of the `dlm` binary.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DlmStatus {
    Ok = 0,
    False = 1,
    ParseError = 2,
    Invalid = 3,
    NotExecutable = 4,
    Budget = 5,
    NullArgument = 6,
    Utf8 = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DlmFrameClass {
    Observational = 0,
    EuclideanTransitive = 1,
    All = 2,
}

/// A model with an optional point.
pub struct DlmModel {
    model: Model,
    point: Option<usize>,
}

impl DlmModel {
    fn pointed(&self) -> Result<PointedModel, Failure> {
        match self.point {
            Some(p) => Ok(self.model.clone().at(p)),
            None => Err(Failure(DlmStatus::Invalid, "the model has no point".into())),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(DlmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => DlmStatus::ParseError,
            Error::NotExecutable { .. } => DlmStatus::NotExecutable,
            Error::Budget { .. } => DlmStatus::Budget,
            _ => DlmStatus::Invalid,
        };
        Failure(status, e.to_string())
    }
}

impl From<dlm::ParseError> for Failure {
    fn from(e: dlm::ParseError) -> Self {
        Failure(DlmStatus::ParseError, e.to_string())
    }
}

fn set_error(msg: Option<String>) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = msg.map(|m| CString::new(m.replace('\0', " ")).expect("no NUL"));
    });
}

/// Runs `body`, records its error message and maps panics to `Panic`.
fn guard(body: impl FnOnce() -> Result<DlmStatus, Failure>) -> DlmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => {
            set_error(None);
            status
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(_) => {
            set_error(Some("internal panic".into()));
            DlmStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(DlmStatus::NullArgument, format!("`{what}` is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(DlmStatus::Utf8, format!("`{what}` is not UTF-8")))
}

unsafe fn model<'a>(p: *const DlmModel) -> Result<&'a DlmModel, Failure> {
    p.as_ref().ok_or_else(|| Failure(DlmStatus::NullArgument, "`model` is null".into()))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(DlmStatus::NullArgument, format!("`{what}` is null")))
    } else {
        Ok(())
    }
}

fn string_out(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no NUL").into_raw()
}

fn handle(model: Model, point: Option<usize>) -> *mut DlmModel {
    Box::into_raw(Box::new(DlmModel { model, point }))
}

fn names(csv: &str) -> Vec<&str> {
    csv.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Message for the last failed call on this thread, or null. Owned by the
/// library; valid until the next call.
#[no_mangle]
pub extern "C" fn dlm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn dlm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reads a JSON model document. Structure and observation consistency are
/// checked; frame conditions are not.
#[no_mangle]
pub unsafe extern "C" fn dlm_model_from_json(json: *const c_char, out: *mut *mut DlmModel) -> DlmStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let loaded = io::read_model(text(json, "json")?)?;
        *out = handle(loaded.model, loaded.point);
        Ok(DlmStatus::Ok)
    })
}

/// The French Drop starting model, pointed at `w`.
#[no_mangle]
pub unsafe extern "C" fn dlm_french_drop(out: *mut *mut DlmModel) -> DlmStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let fd = scenario::french_drop();
        *out = handle(fd.initial.model, Some(fd.initial.point));
        Ok(DlmStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn dlm_model_free(model: *mut DlmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of worlds, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn dlm_model_world_count(model: *const DlmModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.len())
}

#[no_mangle]
pub unsafe extern "C" fn dlm_model_to_json(model: *const DlmModel, out: *mut *mut c_char) -> DlmStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let m = self::model(model)?;
        *out = string_out(io::write_model(&m.model, m.point));
        Ok(DlmStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn dlm_model_to_dot(model: *const DlmModel, out: *mut *mut c_char) -> DlmStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let m = self::model(model)?;
        *out = string_out(dot::model_to_dot(&m.model, m.point));
        Ok(DlmStatus::Ok)
    })
}

/// Evaluates `formula` at the model's point: `Ok` when it holds, `False`
/// when it does not.
#[no_mangle]
pub unsafe extern "C" fn dlm_check(model: *const DlmModel, formula: *const c_char) -> DlmStatus {
    guard(|| {
        let m = self::model(model)?;
        let f = Registry::from_model(&m.model).parse(text(formula, "formula")?)?;
        let pm = m.pointed()?;
        Ok(if kripke::satisfies(&pm, &f) { DlmStatus::Ok } else { DlmStatus::False })
    })
}

/// Applies an action expression such as `show-(a, r & ~l)` at the model's
/// point. A failing precondition gives `NotExecutable` unless `force` is set.
#[no_mangle]
pub unsafe extern "C" fn dlm_update(
    model: *const DlmModel,
    action: *const c_char,
    force: bool,
    out: *mut *mut DlmModel,
) -> DlmStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let m = self::model(model)?;
        let pm = m.pointed()?;
        let act = Registry::from_model(&m.model).parse_action(text(action, "action")?)?;
        let product = if force {
            update::apply_forced(&pm, act.pointed())
        } else {
            let applied = update::apply(&pm, act.pointed());
            if applied.is_none() {
                return Err(Error::NotExecutable {
                    action: act.to_string(),
                    world: pm.point_name().to_owned(),
                }
                .into());
            }
            applied
        };
        let product =
            product.ok_or_else(|| Failure(DlmStatus::Invalid, "the product has no worlds".into()))?;
        *out = handle(product.model, Some(product.point));
        Ok(DlmStatus::Ok)
    })
}

/// Rewrites `formula` without dynamic modalities. `agents` and `props` are
/// comma-separated names.
#[no_mangle]
pub unsafe extern "C" fn dlm_translate(
    formula: *const c_char,
    agents: *const c_char,
    props: *const c_char,
    out: *mut *mut c_char,
) -> DlmStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let reg = Registry::new(names(text(agents, "agents")?), names(text(props, "props")?));
        let f = reg.parse(text(formula, "formula")?)?;
        *out = string_out(reduce::translate(&f).to_string());
        Ok(DlmStatus::Ok)
    })
}

/// Bounded validity check: `Ok` when no countermodel exists within the
/// bounds, `False` otherwise. The first countermodel is stored in
/// `countermodel` unless it is null.
#[no_mangle]
pub unsafe extern "C" fn dlm_verify(
    formula: *const c_char,
    agents: *const c_char,
    props: *const c_char,
    max_worlds: usize,
    frame_class: DlmFrameClass,
    countermodel: *mut *mut DlmModel,
) -> DlmStatus {
    guard(|| {
        let agents = names(text(agents, "agents")?);
        let props = names(text(props, "props")?);
        let f = Registry::new(agents.clone(), props.clone()).parse(text(formula, "formula")?)?;
        let class = match frame_class {
            DlmFrameClass::Observational => FrameClass::Observational,
            DlmFrameClass::EuclideanTransitive => FrameClass::EuclideanTransitive,
            DlmFrameClass::All => FrameClass::All,
        };
        let bounds = Bounds::new(max_worlds, agents, props, class);
        match explorer::check_validity(&f, &bounds)? {
            Verdict::ValidWithinBounds { .. } => Ok(DlmStatus::Ok),
            Verdict::Countermodel(pm) => {
                if !countermodel.is_null() {
                    *countermodel = handle(pm.model, Some(pm.point));
                }
                Ok(DlmStatus::False)
            }
        }
    })
}
