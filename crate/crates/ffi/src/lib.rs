//! C ABI over `lattice_teleport`.
//!
//! Every fallible function returns an [`LtStatus`]; on failure the message is
//! available from [`lt_last_error_message`] on the same thread. Handles are
//! opaque and must be released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lattice_teleport::lattice_ops::{self, LevelPair};
use lattice_teleport::oracle::verify_all;
use lattice_teleport::protocol::{
    teleport, Mode, ParityAssignment, ProtocolConfig, TeleportReport,
};
use lattice_teleport::qstate::{InputQubit, PureState, Register, END_TO_END_TOL};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    VerificationFailed = 3,
    Internal = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LtMode {
    ThreeSite = 0,
    EvenN = 1,
    SingleAncilla = 2,
}

impl From<LtMode> for Mode {
    fn from(m: LtMode) -> Self {
        match m {
            LtMode::ThreeSite => Mode::ThreeSite,
            LtMode::EvenN => Mode::EvenN,
            LtMode::SingleAncilla => Mode::SingleAncilla,
        }
    }
}

/// Opaque lattice state.
pub struct LtState {
    inner: PureState,
}

/// Opaque teleportation report.
pub struct LtReport {
    inner: TeleportReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (LtStatus, String);

fn invalid(e: impl std::fmt::Display) -> Failure {
    (LtStatus::InvalidArgument, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LtStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside lattice-teleport".to_string());
            LtStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err((LtStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn label<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    non_null(p, "particle label")?;
    CStr::from_ptr(p).to_str().map_err(invalid)
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library; valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Teleports `alpha|0⟩ + beta|1⟩` from site 1 to site `num_sites`.
#[no_mangle]
pub unsafe extern "C" fn lt_teleport(
    num_sites: u32,
    mode: LtMode,
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
    out: *mut *mut LtReport,
) -> LtStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let config = ProtocolConfig::new(num_sites as usize, mode.into()).map_err(invalid)?;
        let phi = InputQubit::normalized(
            Complex64::new(alpha_re, alpha_im),
            Complex64::new(beta_re, beta_im),
            1e-9,
        )
        .map_err(invalid)?;
        let run = teleport(&phi, &config).map_err(|e| (LtStatus::Internal, e.to_string()))?;
        *out = Box::into_raw(Box::new(LtReport { inner: run.report }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lt_report_fidelity(report: *const LtReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.fidelity)
}

#[no_mangle]
pub unsafe extern "C" fn lt_report_purity(report: *const LtReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.purity)
}

#[no_mangle]
pub unsafe extern "C" fn lt_report_leakage(report: *const LtReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.leakage)
}

#[no_mangle]
pub unsafe extern "C" fn lt_report_gate_count(report: *const LtReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.gate_count)
}

/// Serializes the report; free the string with [`lt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lt_report_to_json(
    report: *const LtReport,
    out: *mut *mut c_char,
) -> LtStatus {
    guard(|| {
        non_null(report, "report")?;
        non_null(out, "out")?;
        let text = serde_json::to_string(&(*report).inner)
            .map_err(|e| (LtStatus::Internal, e.to_string()))?;
        *out = CString::new(text)
            .map_err(|e| (LtStatus::Internal, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lt_report_free(report: *mut LtReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

#[no_mangle]
pub unsafe extern "C" fn lt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs the oracle suite up to `max_sites` (4..=12). Returns
/// `VerificationFailed` with the failing check names as the error message
/// when any check fails; `failed_checks` receives their number either way.
#[no_mangle]
pub unsafe extern "C" fn lt_verify(max_sites: u32, failed_checks: *mut u32) -> LtStatus {
    guard(|| {
        non_null(failed_checks, "failed_checks")?;
        let report = verify_all(
            max_sites as usize,
            ParityAssignment::Canonical,
            END_TO_END_TOL,
        )
        .map_err(invalid)?;
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} N={}", c.name, c.num_sites))
            .collect();
        *failed_checks = failed.len() as u32;
        if failed.is_empty() {
            Ok(())
        } else {
            Err((LtStatus::VerificationFailed, failed.join(", ")))
        }
    })
}

/// Lattice register `[A1.., S1..SN]` in its all-zero state.
#[no_mangle]
pub unsafe extern "C" fn lt_state_new(
    num_sites: u32,
    num_ancillas: u32,
    out: *mut *mut LtState,
) -> LtStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let reg = Register::lattice(num_sites as usize, num_ancillas as usize).map_err(invalid)?;
        let levels = vec![0; reg.len()];
        let inner = PureState::basis(reg, &levels).map_err(invalid)?;
        *out = Box::into_raw(Box::new(LtState { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lt_state_free(state: *mut LtState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

#[no_mangle]
pub unsafe extern "C" fn lt_state_dim(state: *const LtState) -> usize {
    state.as_ref().map_or(0, |s| s.inner.register().dim())
}

/// Hadamard on levels (0,1) of a site or (0,2) of an ancilla.
#[no_mangle]
pub unsafe extern "C" fn lt_state_hadamard(
    state: *mut LtState,
    particle: *const c_char,
) -> LtStatus {
    guard(|| {
        non_null(state, "state")?;
        let name = label(particle)?;
        let s = &mut (*state).inner;
        let role = s.register().particle(name).map_err(invalid)?.role;
        lattice_ops::hadamard(s, name, LevelPair::for_role(role)).map_err(invalid)
    })
}

#[no_mangle]
pub unsafe extern "C" fn lt_state_shift(state: *mut LtState, phase: f64) -> LtStatus {
    guard(|| {
        non_null(state, "state")?;
        lattice_ops::shift(&mut (*state).inner, phase).map_err(invalid)
    })
}

/// Sweep of `ancilla` over `num_sites` 1-based site indices, in order.
#[no_mangle]
pub unsafe extern "C" fn lt_state_sweep(
    state: *mut LtState,
    ancilla: *const c_char,
    sites: *const u32,
    num_sites: usize,
    phase: f64,
) -> LtStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(sites, "sites")?;
        let name = label(ancilla)?;
        let list: Vec<usize> = std::slice::from_raw_parts(sites, num_sites)
            .iter()
            .map(|&k| k as usize)
            .collect();
        lattice_ops::sweep(&mut (*state).inner, name, &list, phase).map_err(invalid)
    })
}

/// Loads `alpha|0⟩ + beta|1⟩` into `particle`, all else in |0⟩.
#[no_mangle]
pub unsafe extern "C" fn lt_state_load_qubit(
    state: *mut LtState,
    particle: *const c_char,
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
) -> LtStatus {
    guard(|| {
        non_null(state, "state")?;
        let name = label(particle)?;
        let phi = InputQubit::normalized(
            Complex64::new(alpha_re, alpha_im),
            Complex64::new(beta_re, beta_im),
            1e-9,
        )
        .map_err(invalid)?;
        let reg = (*state).inner.register().clone();
        (*state).inner = PureState::with_qubit(reg, name, &phi).map_err(invalid)?;
        Ok(())
    })
}

/// Fidelity of `particle`'s reduced state with `alpha|0⟩ + beta|1⟩`.
#[no_mangle]
pub unsafe extern "C" fn lt_state_qubit_fidelity(
    state: *const LtState,
    particle: *const c_char,
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
    out: *mut f64,
) -> LtStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(out, "out")?;
        let name = label(particle)?;
        let phi = InputQubit::normalized(
            Complex64::new(alpha_re, alpha_im),
            Complex64::new(beta_re, beta_im),
            1e-9,
        )
        .map_err(invalid)?;
        *out = (*state)
            .inner
            .fidelity_with_qubit(name, &phi)
            .map_err(invalid)?;
        Ok(())
    })
}
