//! C ABI for the fsdim library: opaque handles, integer error codes,
//! and a thread-local last-error message.
//!
//! Error codes:
//!   0  success
//!   2  invalid argument / unknown name
//!   3  input error (alphabet, lengths, blocks, grids)
//!   4  machine format error
//!   5  budget or instance-size error
//!   6  I/O or encoding error
//!   7  null pointer or invalid UTF-8

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use fsdim::alphabet::SymbolString;
use fsdim::dimension::{estimate_dim, estimate_mdim, DimParams};
use fsdim::fsc::{Fsc, IlVerdict};
use fsdim::Error;

pub const FSDIM_OK: i32 = 0;
pub const FSDIM_ERR_ARGUMENT: i32 = 2;
pub const FSDIM_ERR_INPUT: i32 = 3;
pub const FSDIM_ERR_MACHINE: i32 = 4;
pub const FSDIM_ERR_BUDGET: i32 = 5;
pub const FSDIM_ERR_IO: i32 = 6;
pub const FSDIM_ERR_POINTER: i32 = 7;

/// Verdicts returned by `fsdim_machine_check_il`.
pub const FSDIM_IL_VERIFIED: i32 = 1;
pub const FSDIM_IL_COLLISION: i32 = 0;
pub const FSDIM_IL_INCONCLUSIVE: i32 = -1;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::UnknownCheck(_) => FSDIM_ERR_ARGUMENT,
        Error::MachineFormat(_)
        | Error::SymbolOutOfRange { .. }
        | Error::StateOutOfRange { .. }
        | Error::NotProductAlphabet(_) => FSDIM_ERR_MACHINE,
        Error::BudgetExceeded(_, _)
        | Error::BudgetTooSmall { .. }
        | Error::InstanceTooLarge(_) => FSDIM_ERR_BUDGET,
        Error::Io(_) => FSDIM_ERR_IO,
        _ => FSDIM_ERR_INPUT,
    }
}

fn fail(err: &Error) -> i32 {
    set_error(&err.to_string());
    code_for(err)
}

/// Opaque symbol-string handle.
pub struct FsdimString(SymbolString);

/// Opaque machine handle.
pub struct FsdimMachine(Fsc);

/// Last error message for this thread; valid until the next failing
/// call. Never null.
#[no_mangle]
pub extern "C" fn fsdim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a digit string (symbols '0'..'9') over an alphabet of size
/// `k` into a new handle. On success stores the handle in `out`.
///
/// # Safety
/// `digits` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn fsdim_string_from_digits(
    k: usize,
    digits: *const c_char,
    out: *mut *mut FsdimString,
) -> i32 {
    if digits.is_null() || out.is_null() {
        set_error("null pointer");
        return FSDIM_ERR_POINTER;
    }
    let text = match CStr::from_ptr(digits).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("digits are not valid UTF-8");
            return FSDIM_ERR_POINTER;
        }
    };
    match SymbolString::from_digits(k, text) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(FsdimString(s)));
            FSDIM_OK
        }
        Err(e) => fail(&e),
    }
}

/// Frees a string handle. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fsdim_string_free(s: *mut FsdimString) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Length of the string behind the handle.
///
/// # Safety
/// `s` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn fsdim_string_len(s: *const FsdimString) -> usize {
    if s.is_null() { 0 } else { (*s).0.len() }
}

/// Normalized block entropy rate H(pi^(l)) / (l log k) of the full
/// string at one block length.
///
/// # Safety
/// `s` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fsdim_entropy_rate(
    s: *const FsdimString,
    l: usize,
    out: *mut f64,
) -> i32 {
    if s.is_null() || out.is_null() {
        set_error("null pointer");
        return FSDIM_ERR_POINTER;
    }
    let u = &(*s).0;
    let compute = || -> fsdim::Result<f64> {
        let trimmed = fsdim::alphabet::prefix_truncate(u, l)?;
        let h = fsdim::blockstats::block_freq_table(&trimmed, l)?.entropy();
        Ok(h / (l as f64 * (u.alphabet_size() as f64).log2()))
    };
    match compute() {
        Ok(v) => {
            *out = v;
            FSDIM_OK
        }
        Err(e) => fail(&e),
    }
}

/// Finite-state dimension estimate with default grid parameters; stores
/// the tail-window lower and upper values.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fsdim_estimate_dim(
    s: *const FsdimString,
    l_max: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> i32 {
    if s.is_null() || lower.is_null() || upper.is_null() {
        set_error("null pointer");
        return FSDIM_ERR_POINTER;
    }
    let u = &(*s).0;
    let compute = || -> fsdim::Result<(f64, f64)> {
        let params = DimParams::for_length(u.len())?.with_l_max(l_max);
        let est = estimate_dim(u, &params)?;
        Ok((est.lower, est.upper))
    };
    match compute() {
        Ok((lo, hi)) => {
            *lower = lo;
            *upper = hi;
            FSDIM_OK
        }
        Err(e) => fail(&e),
    }
}

/// Finite-state mutual dimension estimate of two equal-length strings.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fsdim_estimate_mdim(
    s: *const FsdimString,
    t: *const FsdimString,
    l_max: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> i32 {
    if s.is_null() || t.is_null() || lower.is_null() || upper.is_null() {
        set_error("null pointer");
        return FSDIM_ERR_POINTER;
    }
    let u = &(*s).0;
    let w = &(*t).0;
    let compute = || -> fsdim::Result<(f64, f64)> {
        let params = DimParams::for_length(u.len())?.with_l_max(l_max);
        let est = estimate_mdim(u, w, &params)?;
        Ok((est.lower, est.upper))
    };
    match compute() {
        Ok((lo, hi)) => {
            *lower = lo;
            *upper = hi;
            FSDIM_OK
        }
        Err(e) => fail(&e),
    }
}

/// Loads a machine from its JSON document.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn fsdim_machine_from_json(
    json: *const c_char,
    out: *mut *mut FsdimMachine,
) -> i32 {
    if json.is_null() || out.is_null() {
        set_error("null pointer");
        return FSDIM_ERR_POINTER;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("machine JSON is not valid UTF-8");
            return FSDIM_ERR_POINTER;
        }
    };
    match Fsc::from_json_str(text) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(FsdimMachine(m)));
            FSDIM_OK
        }
        Err(e) => fail(&e),
    }
}

/// Frees a machine handle. Null is ignored.
///
/// # Safety
/// `m` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fsdim_machine_free(m: *mut FsdimMachine) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of states of the machine.
///
/// # Safety
/// `m` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn fsdim_machine_states(m: *const FsdimMachine) -> usize {
    if m.is_null() { 0 } else { (*m).0.state_count() }
}

/// Total output bits of the machine on the string.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fsdim_machine_run_len(
    m: *const FsdimMachine,
    s: *const FsdimString,
    out: *mut u64,
) -> i32 {
    if m.is_null() || s.is_null() || out.is_null() {
        set_error("null pointer");
        return FSDIM_ERR_POINTER;
    }
    match (*m).0.run_len(&(*s).0) {
        Ok(bits) => {
            *out = bits;
            FSDIM_OK
        }
        Err(e) => fail(&e),
    }
}

/// Information-losslessness check; stores FSDIM_IL_VERIFIED,
/// FSDIM_IL_COLLISION, or FSDIM_IL_INCONCLUSIVE in `verdict`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fsdim_machine_check_il(
    m: *const FsdimMachine,
    budget: u64,
    verdict: *mut i32,
) -> i32 {
    if m.is_null() || verdict.is_null() {
        set_error("null pointer");
        return FSDIM_ERR_POINTER;
    }
    *verdict = match (*m).0.check_il(budget) {
        IlVerdict::Verified => FSDIM_IL_VERIFIED,
        IlVerdict::Collision(_) => FSDIM_IL_COLLISION,
        IlVerdict::Inconclusive => FSDIM_IL_INCONCLUSIVE,
    };
    FSDIM_OK
}

/// Audits the generalized Kraft inequality at word length `r`; stores 1
/// in `holds` when the inequality is satisfied, 0 otherwise.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fsdim_machine_kraft_holds(
    m: *const FsdimMachine,
    r: usize,
    budget: u64,
    holds: *mut i32,
) -> i32 {
    if m.is_null() || holds.is_null() {
        set_error("null pointer");
        return FSDIM_ERR_POINTER;
    }
    match (*m).0.kraft_audit(r, budget) {
        Ok(rep) => {
            *holds = rep.holds as i32;
            FSDIM_OK
        }
        Err(e) => fail(&e),
    }
}

/// Suppresses the unused warning for pointer helpers in doc builds.
const _: *const u8 = ptr::null();
