//! C ABI over `cantor-oneway`.
//!
//! Constructions live behind an opaque [`CoConstruction`] handle. Every call
//! returns a [`CoStatus`]; on failure the message is kept per thread and can
//! be read with [`co_last_error`]. Strings handed out by the library must be
//! released with [`co_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cantor_oneway::bitcore::{BitString, PrefixFreeSet};
use cantor_oneway::constructions::{Construction, ConstructionSpec};
use cantor_oneway::inversion::{
    extract_randomized, extract_simple, extract_two_to_one, DovetailLimits, InverterSpec,
};
use cantor_oneway::streams::{evaluate_with_budget, parse_source};
use cantor_oneway::Error;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Io = 4,
    Computation = 5,
    Panic = 6,
}

/// Opaque handle to a built construction.
pub struct CoConstruction {
    inner: Construction,
}

/// Membership verdict for one element.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CoVerdict {
    pub element: u64,
    pub member: bool,
    pub used: u64,
    pub stage_bound: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(CoStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io { .. } => CoStatus::Io,
            _ if e.is_parse() => CoStatus::Parse,
            _ => CoStatus::Computation,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CoStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CoStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(CoStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and NUL-terminated per the caller contract.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Fail(CoStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn give(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn co_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a construction from a descriptor such as `simple:collatz(96,10000)`.
///
/// # Safety
/// `spec` is a NUL-terminated string; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn co_construction_new(spec: *const c_char, out: *mut *mut CoConstruction) -> CoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller contract.
        let spec: ConstructionSpec = unsafe { text(spec, "spec") }?.parse()?;
        let h = Box::new(CoConstruction { inner: spec.build()? });
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = Box::into_raw(h) };
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` is null or came from [`co_construction_new`] and was not freed.
#[no_mangle]
pub unsafe extern "C" fn co_construction_free(h: *mut CoConstruction) {
    if !h.is_null() {
        // SAFETY: ownership returns to Rust exactly once.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Evaluates `bits` output bits on the source `input` (e.g. `zeros`,
/// `periodic:10`). Writes the bits as a `0`/`1` string and the oracle-use.
///
/// # Safety
/// `h` is a live handle, `input` a NUL-terminated string, `out_bits` and
/// `out_used` writable.
#[no_mangle]
pub unsafe extern "C" fn co_eval(
    h: *const CoConstruction,
    input: *const c_char,
    bits: usize,
    budget: u64,
    out_bits: *mut *mut c_char,
    out_used: *mut u64,
) -> CoStatus {
    guard(|| {
        if h.is_null() || out_bits.is_null() || out_used.is_null() {
            return Err(null("handle or output"));
        }
        // SAFETY: caller contract.
        let (c, input) = unsafe { (&(*h).inner, text(input, "input")?) };
        let x = parse_source(input)?;
        let e = evaluate_with_budget(c.function.as_ref(), &x, bits, budget)?;
        // SAFETY: outputs are non-null and writable.
        unsafe {
            *out_bits = give(e.bits.to_string());
            *out_used = e.used;
        }
        Ok(())
    })
}

/// Decides whether `n` is in the enumerated set using the inverter `inverter`
/// (`reference`, `flip:K` or `zeros`). The extraction follows the family:
/// simple, randomized on the whole space, or two-to-one unrelativized.
///
/// # Safety
/// `h` is a live handle, `inverter` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn co_extract(
    h: *const CoConstruction,
    inverter: *const c_char,
    n: u64,
    out: *mut CoVerdict,
) -> CoStatus {
    guard(|| {
        if h.is_null() || out.is_null() {
            return Err(null("handle or output"));
        }
        // SAFETY: caller contract.
        let (c, inverter) = unsafe { (&(*h).inner, text(inverter, "inverter")?) };
        let g = inverter.parse::<InverterSpec>()?.build(c)?;
        let w = c
            .enumeration
            .as_ref()
            .ok_or_else(|| Error::Usage(format!("{} has no enumeration to decide", c.spec)))?;
        let empty = BitString::new();
        let v = match c.spec {
            ConstructionSpec::Simple(_) => extract_simple(&g, w, n)?,
            ConstructionSpec::Surjection(_) => {
                extract_randomized(&g, c.function.as_ref(), &empty, w, n, DovetailLimits::default())?.verdict
            }
            ConstructionSpec::TwoToOneV1(_) => extract_two_to_one(&g, w, n, &empty, &empty)?,
            _ => return Err(Error::Usage(format!("no extraction for {}", c.spec)).into()),
        };
        // SAFETY: `out` is non-null and writable.
        unsafe {
            *out = CoVerdict {
                element: v.element,
                member: v.member,
                used: v.certificate.used,
                stage_bound: v.certificate.stage_bound,
            }
        };
        Ok(())
    })
}

/// Exact measure of a prefix-free set given one word per line, restricted to
/// the cylinder `sigma` when it is non-null. Writes a reduced fraction `p/q`.
///
/// # Safety
/// `words` is NUL-terminated, `sigma` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn co_measure(words: *const c_char, sigma: *const c_char, out: *mut *mut c_char) -> CoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller contract.
        let v = PrefixFreeSet::parse(unsafe { text(words, "words") }?)?;
        let m = if sigma.is_null() {
            v.measure()
        } else {
            // SAFETY: non-null, caller contract.
            let s: BitString = unsafe { text(sigma, "sigma") }?.parse()?;
            v.intersect_measure(&s)
        };
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = give(m.to_string()) };
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or was returned by this library and not freed.
#[no_mangle]
pub unsafe extern "C" fn co_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the string was produced by `CString::into_raw`.
        drop(unsafe { CString::from_raw(s) });
    }
}
