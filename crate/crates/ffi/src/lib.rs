//! C interface to the nkverify engine.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `*_free` function. Every fallible call returns an [`NkStatus`]
//! and leaves a message for [`nk_last_error_message`] on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nkverify::humfit::{build_h_from_V, CubicTensor};
use nkverify::lagrangian::{example_by_name, Immersion, Manifest};
use nkverify::report::VerificationReport;
use nkverify::suites::{self, ProofMode, SuiteOptions};
use nkverify::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    UnknownExample = 5,
    Domain = 6,
    Numeric = 7,
    Io = 8,
    /// A panic was caught at the boundary.
    Internal = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NkProofMode {
    Exact = 0,
    Numeric = 1,
    All = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct NkOptions {
    pub seed: u64,
    /// Tolerance override, used only when `use_tol` is nonzero.
    pub tol: f64,
    pub use_tol: i32,
    pub timings: i32,
}

/// Opaque verification report.
pub struct NkReport(VerificationReport);

/// Opaque parametrized immersion.
pub struct NkImmersion(Immersion);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> NkStatus {
    match e {
        Error::Parse(_) | Error::Json(_) => NkStatus::Parse,
        Error::UnknownExample(_) => NkStatus::UnknownExample,
        Error::Domain(_) | Error::Precondition(_) | Error::InvalidState(_) | Error::Branch(_) => NkStatus::Domain,
        Error::Numeric(_) | Error::Singular(_) => NkStatus::Numeric,
        Error::Io(_) => NkStatus::Io,
    }
}

struct Fail(NkStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NkStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            NkStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(NkStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(NkStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn out_arg<T>(out: *mut *mut T) -> Result<(), Fail> {
    if out.is_null() {
        Err(Fail(NkStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

unsafe fn options(opts: *const NkOptions) -> Result<SuiteOptions, Fail> {
    if opts.is_null() {
        return Ok(SuiteOptions::default());
    }
    let o = *opts;
    let tol = if o.use_tol != 0 {
        if !(o.tol.is_finite() && o.tol >= 0.0) {
            return Err(Fail(
                NkStatus::InvalidArgument,
                format!("tolerance must be finite and non-negative, got {}", o.tol),
            ));
        }
        Some(o.tol)
    } else {
        None
    };
    Ok(SuiteOptions { seed: o.seed, tol, timings: o.timings != 0 })
}

unsafe fn emit_report(out: *mut *mut NkReport, r: VerificationReport) {
    *out = Box::into_raw(Box::new(NkReport(r)));
}

/// Message of the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn nk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static version string.
#[no_mangle]
pub extern "C" fn nk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Fills `out` with the command-line defaults.
///
/// # Safety
/// `out` must be null or point to writable memory for one `NkOptions`.
#[no_mangle]
pub unsafe extern "C" fn nk_options_default(out: *mut NkOptions) -> NkStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return NkStatus::NullPointer;
    }
    *out = NkOptions { seed: suites::DEFAULT_SEED, tol: 0.0, use_tol: 0, timings: 0 };
    NkStatus::Ok
}

/// # Safety
/// `opts` may be null (defaults); `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_run_structure(
    opts: *const NkOptions,
    samples: usize,
    g_samples: usize,
    out: *mut *mut NkReport,
) -> NkStatus {
    guard(|| {
        out_arg(out)?;
        let o = options(opts)?;
        emit_report(out, suites::structure_suite(samples, g_samples, &o));
        Ok(())
    })
}

/// # Safety
/// `name` must be a nul-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_immersion_from_example(name: *const c_char, out: *mut *mut NkImmersion) -> NkStatus {
    guard(|| {
        out_arg(out)?;
        let imm = example_by_name(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(NkImmersion(imm)));
        Ok(())
    })
}

/// Builds an immersion from manifest JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_immersion_from_manifest(json: *const c_char, out: *mut *mut NkImmersion) -> NkStatus {
    guard(|| {
        out_arg(out)?;
        let imm = Manifest::from_json(str_arg(json, "manifest")?)?.build()?;
        *out = Box::into_raw(Box::new(NkImmersion(imm)));
        Ok(())
    })
}

/// Image of parameter `u` as two unit quaternions `(p, q)`, written to `out[0..8]`.
///
/// # Safety
/// `imm` must come from this library; `u` must hold 3 doubles and `out` 8.
#[no_mangle]
pub unsafe extern "C" fn nk_immersion_point(imm: *const NkImmersion, u: *const f64, out: *mut f64) -> NkStatus {
    guard(|| {
        if imm.is_null() || u.is_null() || out.is_null() {
            return Err(Fail(NkStatus::NullPointer, "null argument".into()));
        }
        let u = [*u, *u.add(1), *u.add(2)];
        let pt = (*imm).0.point(&u)?;
        let vals: Vec<f64> = pt.p().to_array().into_iter().chain(pt.q().to_array()).collect();
        ptr::copy_nonoverlapping(vals.as_ptr(), out, 8);
        Ok(())
    })
}

/// # Safety
/// `imm` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nk_immersion_free(imm: *mut NkImmersion) {
    if !imm.is_null() {
        drop(Box::from_raw(imm));
    }
}

/// # Safety
/// `imms` must point to `n` valid immersion handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nk_run_lagrangian(
    imms: *const *const NkImmersion,
    n: usize,
    grid: usize,
    opts: *const NkOptions,
    out: *mut *mut NkReport,
) -> NkStatus {
    guard(|| {
        out_arg(out)?;
        if n == 0 {
            return Err(Fail(NkStatus::InvalidArgument, "no immersions given".into()));
        }
        if imms.is_null() {
            return Err(Fail(NkStatus::NullPointer, "immersion array is null".into()));
        }
        let mut list = Vec::with_capacity(n);
        for i in 0..n {
            let h = *imms.add(i);
            if h.is_null() {
                return Err(Fail(NkStatus::NullPointer, format!("immersion {i} is null")));
            }
            list.push((*h).0.clone());
        }
        let o = options(opts)?;
        emit_report(out, suites::lagrangian_suite(&list, grid, &o));
        Ok(())
    })
}

/// # Safety
/// `opts` may be null; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nk_run_proof(
    trials: usize,
    mode: NkProofMode,
    opts: *const NkOptions,
    out: *mut *mut NkReport,
) -> NkStatus {
    guard(|| {
        out_arg(out)?;
        if trials == 0 {
            return Err(Fail(NkStatus::InvalidArgument, "trials must be at least 1".into()));
        }
        let mode = match mode {
            NkProofMode::Exact => ProofMode::Exact,
            NkProofMode::Numeric => ProofMode::Numeric,
            NkProofMode::All => ProofMode::All,
        };
        let o = options(opts)?;
        emit_report(out, suites::proof_suite(trials, mode, &o));
        Ok(())
    })
}

/// Fits a cubic tensor given as JSON text.
///
/// # Safety
/// `tensor_json` must be a nul-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nk_run_fit(
    tensor_json: *const c_char,
    opts: *const NkOptions,
    out: *mut *mut NkReport,
) -> NkStatus {
    guard(|| {
        out_arg(out)?;
        let h = CubicTensor::from_json(str_arg(tensor_json, "tensor")?)?;
        let o = options(opts)?;
        emit_report(out, suites::fit_report(&h, &o));
        Ok(())
    })
}

/// Components (111, 112, 113, 122, 123, 133, 222, 223, 233, 333) of the cubic form built from `V`.
///
/// # Safety
/// `v` must hold 3 doubles and `out` 10.
#[no_mangle]
pub unsafe extern "C" fn nk_cubic_from_v(v: *const f64, out: *mut f64) -> NkStatus {
    guard(|| {
        if v.is_null() || out.is_null() {
            return Err(Fail(NkStatus::NullPointer, "null argument".into()));
        }
        let h = build_h_from_V(&[*v, *v.add(1), *v.add(2)]);
        ptr::copy_nonoverlapping(h.components().as_ptr(), out, 10);
        Ok(())
    })
}

/// 1 if no check failed, 0 otherwise (also 0 for a null handle).
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn nk_report_passed(r: *const NkReport) -> i32 {
    if r.is_null() {
        return 0;
    }
    i32::from((*r).0.passed())
}

/// Serializes a report as JSON; free the string with [`nk_string_free`].
///
/// # Safety
/// `r` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_report_to_json(r: *const NkReport, out: *mut *mut c_char) -> NkStatus {
    guard(|| {
        out_arg(out)?;
        if r.is_null() {
            return Err(Fail(NkStatus::NullPointer, "report is null".into()));
        }
        let s = CString::new((*r).0.to_json()).map_err(|e| Fail(NkStatus::Internal, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a report handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nk_report_free(r: *mut NkReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
