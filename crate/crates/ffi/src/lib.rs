//! C interface to `ssgmanip`.
//!
//! Instances live behind an opaque `SsgInstance` handle. Every fallible call
//! returns an `SsgStatus`; on failure a description is available from
//! `ssg_last_error` on the same thread. Targets and type indices are 0-based.
//! Output arrays are caller-allocated and must hold `ssg_num_targets` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use ssgmanip::gen::{generate_instance, GenConfig};
use ssgmanip::io::{policy_to_json, Instance};
use ssgmanip::policy::{eop_with, qr_policy_from, sse_policy_from, OptimalPolicySolver, SseTable};
use ssgmanip::solvers::DEFAULT_TOL;
use ssgmanip::{maximin, optimal_report, shift_nonnegative, solve_sse, Error};

/// Result codes shared by all fallible functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Internal = 4,
}

/// A game and its attacker type set.
pub struct SsgInstance {
    inner: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> SsgStatus {
    match err {
        Error::Io(_) => SsgStatus::Io,
        e if e.is_validation() => SsgStatus::InvalidArgument,
        _ => SsgStatus::Internal,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), SsgStatus>) -> SsgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SsgStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SsgStatus::Internal
        }
    }
}

fn fail(err: Error) -> SsgStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> SsgStatus {
    set_error(format!("{what} is null"));
    SsgStatus::NullPointer
}

unsafe fn instance<'a>(handle: *const SsgInstance) -> Result<&'a Instance, SsgStatus> {
    handle
        .as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| null("instance"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, SsgStatus> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        SsgStatus::InvalidArgument
    })
}

unsafe fn out_slice<'a>(p: *mut f64, n: usize, what: &str) -> Result<&'a mut [f64], SsgStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, n))
}

unsafe fn store<T>(p: *mut T, v: T) {
    if !p.is_null() {
        *p = v;
    }
}

unsafe fn publish(out: *mut *mut SsgInstance, inner: Instance) {
    *out = Box::into_raw(Box::new(SsgInstance { inner }));
}

fn check_type(inst: &Instance, type_index: usize) -> Result<(), SsgStatus> {
    inst.types.get(type_index).map(|_| ()).map_err(fail)
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn ssg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses an instance from a NUL-terminated JSON document.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssg_instance_from_json(
    json: *const c_char,
    out: *mut *mut SsgInstance,
) -> SsgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inst = Instance::from_json(text(json, "json")?).map_err(fail)?;
        publish(out, inst);
        Ok(())
    })
}

/// Loads an instance file.
///
/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssg_instance_load(
    path: *const c_char,
    out: *mut *mut SsgInstance,
) -> SsgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inst = ssgmanip::io::load_instance(text(path, "path")?).map_err(fail)?;
        publish(out, inst);
        Ok(())
    })
}

/// Draws a random instance; defender payoffs come out non-negative.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssg_instance_generate(
    n: usize,
    m: usize,
    lambda: usize,
    rho: f64,
    seed: u64,
    include_zero_sum: bool,
    out: *mut *mut SsgInstance,
) -> SsgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = GenConfig {
            include_zero_sum,
            ..GenConfig::new(n, m, lambda, rho, seed)
        };
        let (game, types) = generate_instance(&cfg).map_err(fail)?;
        publish(
            out,
            Instance {
                game,
                types,
                meta: Some(cfg),
            },
        );
        Ok(())
    })
}

/// Serializes an instance to JSON. Free the result with `ssg_string_free`.
///
/// # Safety
/// `inst` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssg_instance_to_json(
    inst: *const SsgInstance,
    out: *mut *mut c_char,
) -> SsgStatus {
    guard(|| {
        let inst = instance(inst)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(inst.to_json())
            .expect("json has no NUL")
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `inst` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssg_instance_free(inst: *mut SsgInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of targets, or 0 for a NULL handle.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ssg_num_targets(inst: *const SsgInstance) -> usize {
    inst.as_ref().map_or(0, |h| h.inner.game.num_targets())
}

/// Number of attacker types, or 0 for a NULL handle.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ssg_num_types(inst: *const SsgInstance) -> usize {
    inst.as_ref().map_or(0, |h| h.inner.types.len())
}

/// Number of defender resources, or 0 for a NULL handle.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ssg_num_resources(inst: *const SsgInstance) -> usize {
    inst.as_ref().map_or(0, |h| h.inner.game.resources())
}

/// Shifts the defender payoffs in place so the smallest is 0. The added
/// constant is written to `offset` when non-NULL.
///
/// # Safety
/// `inst` must be a live handle; `offset` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ssg_instance_shift(inst: *mut SsgInstance, offset: *mut f64) -> SsgStatus {
    guard(|| {
        let h = inst.as_mut().ok_or_else(|| null("instance"))?;
        let (game, k) = shift_nonnegative(&h.inner.game);
        h.inner.game = game;
        store(offset, k);
        Ok(())
    })
}

/// SSE against type `type_index`. `coverage` receives n values.
///
/// # Safety
/// `inst` must be a live handle, `coverage` must hold n doubles, and the
/// scalar outputs must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ssg_solve_sse(
    inst: *const SsgInstance,
    type_index: usize,
    coverage: *mut f64,
    target: *mut usize,
    def_value: *mut f64,
    atk_value: *mut f64,
) -> SsgStatus {
    guard(|| {
        let inst = instance(inst)?;
        check_type(inst, type_index)?;
        let cov = out_slice(coverage, inst.game.num_targets(), "coverage")?;
        let r = solve_sse(&inst.game, &inst.types[type_index], DEFAULT_TOL);
        cov.copy_from_slice(r.coverage.as_slice());
        store(target, r.target);
        store(def_value, r.def_value);
        store(atk_value, r.atk_value);
        Ok(())
    })
}

/// Maximin coverage and value of the defender.
///
/// # Safety
/// `inst` must be a live handle, `coverage` must hold n doubles, and the
/// scalar outputs must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ssg_maximin(
    inst: *const SsgInstance,
    coverage: *mut f64,
    value: *mut f64,
    fully_mixed: *mut bool,
) -> SsgStatus {
    guard(|| {
        let inst = instance(inst)?;
        let cov = out_slice(coverage, inst.game.num_targets(), "coverage")?;
        let r = maximin(&inst.game, DEFAULT_TOL);
        cov.copy_from_slice(r.coverage.as_slice());
        store(value, r.value);
        store(fully_mixed, r.fully_mixed);
        Ok(())
    })
}

/// Optimal fake report of type `type_index`. The fake type's payoffs go to
/// `fake_rewards`/`fake_penalties` and the induced coverage to `coverage`
/// (n doubles each).
///
/// # Safety
/// `inst` must be a live handle, the three arrays must hold n doubles, and
/// the scalar outputs must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ssg_optimal_report(
    inst: *const SsgInstance,
    type_index: usize,
    fake_rewards: *mut f64,
    fake_penalties: *mut f64,
    coverage: *mut f64,
    target: *mut usize,
    atk_value: *mut f64,
    def_value: *mut f64,
) -> SsgStatus {
    guard(|| {
        let inst = instance(inst)?;
        check_type(inst, type_index)?;
        let n = inst.game.num_targets();
        let rewards = out_slice(fake_rewards, n, "fake_rewards")?;
        let penalties = out_slice(fake_penalties, n, "fake_penalties")?;
        let cov = out_slice(coverage, n, "coverage")?;
        let r = optimal_report(&inst.game, &inst.types[type_index]);
        rewards.copy_from_slice(r.fake_type.rewards());
        penalties.copy_from_slice(r.fake_type.penalties());
        cov.copy_from_slice(r.induced.coverage.as_slice());
        store(target, r.induced.target);
        store(atk_value, r.atk_true_value);
        store(def_value, r.manip_def_value);
        Ok(())
    })
}

unsafe fn with_sse(
    inst: *const SsgInstance,
    f: impl FnOnce(&Instance, &SseTable) -> Result<(), Error>,
) -> SsgStatus {
    guard(|| {
        let inst = instance(inst)?;
        let sse = SseTable::compute(&inst.game, &inst.types).map_err(fail)?;
        f(inst, &sse).map_err(fail)
    })
}

/// EoP of the policy that plays each reported type's SSE.
///
/// # Safety
/// `inst` must be a live handle and `eop` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssg_eop_sse(inst: *const SsgInstance, eop: *mut f64) -> SsgStatus {
    if eop.is_null() {
        return null("eop");
    }
    with_sse(inst, |i, sse| {
        *eop = eop_with(&sse_policy_from(sse), &i.game, &i.types, sse)?.overall;
        Ok(())
    })
}

/// EoP of the quantal-response policy with precision `phi`.
///
/// # Safety
/// `inst` must be a live handle and `eop` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssg_eop_qr(
    inst: *const SsgInstance,
    phi: f64,
    eop: *mut f64,
) -> SsgStatus {
    if eop.is_null() {
        return null("eop");
    }
    with_sse(inst, |i, sse| {
        let policy = qr_policy_from(&i.game, &i.types, sse, phi)?;
        *eop = eop_with(&policy, &i.game, &i.types, sse)?.overall;
        Ok(())
    })
}

/// Optimal policy by bisection to width `delta`. Writes the accepted
/// threshold to `xi`, the policy's EoP to `eop`, and (when `policy_json` is
/// non-NULL) the policy as JSON, to be freed with `ssg_string_free`.
///
/// # Safety
/// `inst` must be a live handle; the outputs must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ssg_optimal_policy(
    inst: *const SsgInstance,
    delta: f64,
    xi: *mut f64,
    eop: *mut f64,
    policy_json: *mut *mut c_char,
) -> SsgStatus {
    with_sse(inst, |i, sse| {
        let (policy, x) =
            OptimalPolicySolver::with_sse(&i.game, &i.types, sse.clone()).maximize(delta)?;
        let report = eop_with(&policy, &i.game, &i.types, sse)?;
        store(xi, x);
        store(eop, report.overall);
        if !policy_json.is_null() {
            *policy_json = CString::new(policy_to_json(&policy))
                .expect("json has no NUL")
                .into_raw();
        }
        Ok(())
    })
}
