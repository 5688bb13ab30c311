//! C ABI over the stablecut solvers.
//!
//! Instances and certificates cross the boundary as opaque handles built from and
//! rendered to the same JSON the command-line tool reads and writes. Every function
//! returns an [`ScStatus`]; on failure [`sc_last_error`] describes what went wrong on
//! the calling thread. Strings handed out by the library must be released with
//! [`sc_string_free`], handles with their own `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stablecut::cli::cert::{self, Certificate, VerdictKind};
use stablecut::cli::io::InstanceFile;
use stablecut::cli::{self as cli, SolveOptions};
use stablecut::stability_oracle::{self, EnumerationBudget};
use stablecut::Rational;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// JSON was malformed or did not describe a valid instance or certificate.
    Parse = 3,
    /// The solver, LP or stability oracle failed.
    Solver = 4,
    /// An argument was out of range.
    InvalidArgument = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Outcome recorded in a certificate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScVerdict {
    /// The returned solution is the unique optimum.
    Optimal = 0,
    /// The instance is certainly not stable enough; no solution is returned.
    NotStable = 1,
    /// Heuristic output whose optimality rests on the input's stability.
    Candidate = 2,
}

/// Parsed, validated instance.
pub struct ScInstance {
    file: InstanceFile,
}

/// Solver output for one instance.
pub struct ScCertificate {
    cert: Certificate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(ScStatus, String);

fn fail<T>(status: ScStatus, msg: impl ToString) -> Result<T, Fail> {
    Err(Fail(status, msg.to_string()))
}

/// Runs `f` behind a panic guard, recording any error message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ScStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ScStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return fail(ScStatus::NullPointer, "null string argument");
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(s),
        Err(e) => fail(ScStatus::InvalidUtf8, e),
    }
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().map_or_else(|| fail(ScStatus::NullPointer, "null handle"), Ok)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return fail(ScStatus::NullPointer, "null output pointer");
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    match CString::new(s) {
        Ok(c) => put(out, c.into_raw()),
        Err(e) => fail(ScStatus::Solver, e),
    }
}

/// Message for the last call on this thread if it failed, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn sc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates an instance from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_instance_from_json(json: *const c_char, out: *mut *mut ScInstance) -> ScStatus {
    guard(|| {
        let text = str_arg(json)?;
        let file = InstanceFile::parse(text).or_else(|e| fail(ScStatus::Parse, e))?;
        file.to_instance().or_else(|e| fail(ScStatus::Parse, e))?;
        put(out, Box::into_raw(Box::new(ScInstance { file })))
    })
}

/// Canonical JSON for the instance.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_instance_to_json(inst: *const ScInstance, out: *mut *mut c_char) -> ScStatus {
    guard(|| put_string(out, ref_arg(inst)?.file.to_json()))
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `inst` must come from [`sc_instance_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sc_instance_free(inst: *mut ScInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Runs the problem's robust algorithm with default options.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_solve(inst: *const ScInstance, out: *mut *mut ScCertificate) -> ScStatus {
    guard(|| {
        let inst = ref_arg(inst)?;
        let cert = cli::solve(&inst.file, &SolveOptions::default()).or_else(|e| fail(ScStatus::Solver, e))?;
        put(out, Box::into_raw(Box::new(ScCertificate { cert })))
    })
}

/// Parses a certificate from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_certificate_from_json(json: *const c_char, out: *mut *mut ScCertificate) -> ScStatus {
    guard(|| {
        let cert: Certificate = serde_json::from_str(str_arg(json)?).or_else(|e| fail(ScStatus::Parse, e))?;
        put(out, Box::into_raw(Box::new(ScCertificate { cert })))
    })
}

/// The certificate's verdict.
///
/// # Safety
/// `cert` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_certificate_verdict(cert: *const ScCertificate, out: *mut ScVerdict) -> ScStatus {
    guard(|| {
        let v = match ref_arg(cert)?.cert.verdict {
            VerdictKind::Optimal => ScVerdict::Optimal,
            VerdictKind::NotStable => ScVerdict::NotStable,
            VerdictKind::Candidate => ScVerdict::Candidate,
        };
        put(out, v)
    })
}

/// Objective of the returned solution as `"p/q"`, or null when there is none.
///
/// # Safety
/// `cert` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_certificate_objective(cert: *const ScCertificate, out: *mut *mut c_char) -> ScStatus {
    guard(|| match &ref_arg(cert)?.cert.objective {
        Some(r) => put_string(out, r.to_string()),
        None => put(out, ptr::null_mut()),
    })
}

/// Certificate as pretty JSON.
///
/// # Safety
/// `cert` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_certificate_to_json(cert: *const ScCertificate, out: *mut *mut c_char) -> ScStatus {
    guard(|| {
        let text = serde_json::to_string_pretty(&ref_arg(cert)?.cert).or_else(|e| fail(ScStatus::Solver, e))?;
        put_string(out, text)
    })
}

/// Re-checks the certificate's solution against the instance; `valid` is set to 1 or 0.
///
/// # Safety
/// Both handles must be live; `valid` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_verify(cert: *const ScCertificate, inst: *const ScInstance, valid: *mut i32) -> ScStatus {
    guard(|| {
        let rep = cert::verify(&ref_arg(cert)?.cert, &ref_arg(inst)?.file).or_else(|e| fail(ScStatus::Parse, e))?;
        put(valid, i32::from(rep.valid))
    })
}

/// Releases a certificate. Null is ignored.
///
/// # Safety
/// `cert` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sc_certificate_free(cert: *mut ScCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Exact stability margin by enumeration, as `"p/q"` or `"inf"`. `max_solutions = 0`
/// keeps the default budget and size caps.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_stability_margin(inst: *const ScInstance, max_solutions: usize, out: *mut *mut c_char) -> ScStatus {
    guard(|| {
        let instance = ref_arg(inst)?.file.to_instance().or_else(|e| fail(ScStatus::Parse, e))?;
        let budget = match max_solutions {
            0 => EnumerationBudget::default(),
            n => EnumerationBudget { max_solutions: n, enforce_caps: false },
        };
        let rep = stability_oracle::stability_margin(&instance, &budget).or_else(|e| fail(ScStatus::Solver, e))?;
        put_string(out, rep.gamma_star.to_string())
    })
}

/// Whether the instance is γ-stable, with γ given as `"p/q"` or a decimal; sets 1 or 0.
///
/// # Safety
/// `inst` must be a live handle, `gamma` NUL-terminated, `stable` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_is_stable(inst: *const ScInstance, gamma: *const c_char, stable: *mut i32) -> ScStatus {
    guard(|| {
        let g: Rational = str_arg(gamma)?.parse().or_else(|e| fail(ScStatus::InvalidArgument, e))?;
        if g < Rational::one() {
            return fail(ScStatus::InvalidArgument, "gamma must be at least 1");
        }
        let instance = ref_arg(inst)?.file.to_instance().or_else(|e| fail(ScStatus::Parse, e))?;
        let rep = stability_oracle::stability_margin(&instance, &EnumerationBudget::default()).or_else(|e| fail(ScStatus::Solver, e))?;
        put(stable, i32::from(rep.is_stable(&g)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_records_and_clears_errors() {
        assert_eq!(guard(|| fail(ScStatus::Solver, "bad\0input")), ScStatus::Solver);
        let msg = unsafe { CStr::from_ptr(sc_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "bad input");
        assert_eq!(guard(|| Ok(())), ScStatus::Ok);
        assert!(sc_last_error().is_null());
    }

    #[test]
    fn guard_catches_panics() {
        let hook = std::panic::take_hook();
        std::panic::set_hook(Box::new(|_| {}));
        let status = guard(|| panic!("boom"));
        std::panic::set_hook(hook);
        assert_eq!(status, ScStatus::Panic);
    }
}
