//! C ABI over `incidence-core`.
//!
//! Every function returns an [`IncStatus`]. On failure the message is kept in
//! a thread-local slot readable through [`inc_last_error`]. Handles are opaque
//! and must be released with their `_free` function. Strings returned through
//! out-pointers are owned by the caller and released with [`inc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use incidence_core::field::FieldDesc;
use incidence_core::io;
use incidence_core::poset::Poset;
use incidence_core::preserver::{LinearMap, PreserverError};
use incidence_core::verifier::{self, VerifyError};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Gate = 4,
    Refuted = 5,
    NotApplicable = 6,
    Overflow = 7,
    Internal = 8,
}

/// Opaque finite poset.
pub struct IncPoset(Arc<Poset>);

/// Opaque linear map on an incidence algebra.
pub struct IncMap(LinearMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

struct Fail(IncStatus, String);

impl From<VerifyError> for Fail {
    fn from(e: VerifyError) -> Self {
        let status = match &e {
            VerifyError::Gate(_) | VerifyError::Preserver(PreserverError::Gate(_)) => {
                IncStatus::Gate
            }
            VerifyError::NotUnital(_) | VerifyError::Refuted { .. } => IncStatus::Refuted,
            VerifyError::NotApplicable(_)
            | VerifyError::InfiniteField(_)
            | VerifyError::UnknownExample(_) => IncStatus::NotApplicable,
            _ => IncStatus::Internal,
        };
        Fail(status, e.to_string())
    }
}

impl From<PreserverError> for Fail {
    fn from(e: PreserverError) -> Self {
        let status = match e {
            PreserverError::Gate(_) => IncStatus::Gate,
            PreserverError::InfiniteField(_) => IncStatus::NotApplicable,
            _ => IncStatus::Internal,
        };
        Fail(status, e.to_string())
    }
}

impl From<io::ParseError> for Fail {
    fn from(e: io::ParseError) -> Self {
        Fail(IncStatus::Parse, e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(IncStatus::Internal, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> IncStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IncStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside incidence-core");
            IncStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(IncStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(IncStatus::InvalidUtf8, e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(IncStatus::NullPointer, "null handle".into()))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(IncStatus::NullPointer, "null out-pointer".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail(IncStatus::Internal, e.to_string()))?;
    write(out, c.into_raw())
}

/// Message for the last failing call on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn inc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn inc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builtin poset by name (`chain:N`, `antichain:N`, `v`, `diamond`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inc_poset_builtin(name: *const c_char, out: *mut *mut IncPoset) -> IncStatus {
    guard(|| {
        let p = Poset::builtin(text(name)?).map_err(|e| Fail(IncStatus::Parse, e.to_string()))?;
        write(out, Box::into_raw(Box::new(IncPoset(Arc::new(p)))))
    })
}

/// Poset from the text format.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inc_poset_parse(source: *const c_char, out: *mut *mut IncPoset) -> IncStatus {
    guard(|| {
        let p = io::parse_poset(text(source)?)?;
        write(out, Box::into_raw(Box::new(IncPoset(Arc::new(p)))))
    })
}

/// # Safety
/// `poset` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn inc_poset_free(poset: *mut IncPoset) {
    if !poset.is_null() {
        drop(Box::from_raw(poset));
    }
}

/// Number of elements and dimension of the incidence algebra.
///
/// # Safety
/// `poset` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn inc_poset_size(
    poset: *const IncPoset,
    elements: *mut usize,
    dimension: *mut usize,
) -> IncStatus {
    guard(|| {
        let p = &deref(poset)?.0;
        write(elements, p.len())?;
        write(dimension, p.basis_len())
    })
}

/// Parses a map file body over `poset`. `field` is `"Q"` or `"Fp 5"`; it may
/// be NULL when the text carries a `field:` header.
///
/// # Safety
/// `poset` must be a live handle; strings NUL-terminated or NULL where noted.
#[no_mangle]
pub unsafe extern "C" fn inc_map_parse(
    poset: *const IncPoset,
    field: *const c_char,
    source: *const c_char,
    out: *mut *mut IncMap,
) -> IncStatus {
    guard(|| {
        let p = &deref(poset)?.0;
        let f = if field.is_null() { None } else { Some(io::parse_field(text(field)?)?) };
        let map = io::parse_map(text(source)?, Some(p), f, None)?;
        write(out, Box::into_raw(Box::new(IncMap(map))))
    })
}

/// # Safety
/// `map` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn inc_map_free(map: *mut IncMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inc_map_is_unital(map: *const IncMap, out: *mut bool) -> IncStatus {
    guard(|| write(out, deref(map)?.0.is_unital()))
}

/// Exact invertibility-preservation decision (finite fields).
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inc_map_preserves_invertibility(map: *const IncMap, out: *mut bool) -> IncStatus {
    guard(|| {
        let v = deref(map)?.0.preserves_invertibility()?;
        write(out, v)
    })
}

/// Classification report as JSON. A map that is not a unital preserver still
/// returns `Ok`; the report carries the refutation.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inc_map_classify_json(map: *const IncMap, out: *mut *mut c_char) -> IncStatus {
    guard(|| {
        let report = verifier::classification_report(&deref(map)?.0)?;
        write_string(out, serde_json::to_string(&report)?)
    })
}

/// Closed-form number of unital invertibility preservers over a finite field.
///
/// # Safety
/// `poset` must be a live handle; `field` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn inc_theorem_count(
    poset: *const IncPoset,
    field: *const c_char,
    out: *mut u64,
) -> IncStatus {
    guard(|| {
        let p = &deref(poset)?.0;
        let f: FieldDesc = io::parse_field(text(field)?)?;
        let n = verifier::count_from_theorem(p, f)?;
        let n = u64::try_from(n).map_err(|_| Fail(IncStatus::Overflow, format!("count {n} exceeds u64")))?;
        write(out, n)
    })
}

/// Brute-force census of all linear maps, as a JSON report.
///
/// # Safety
/// `poset` must be a live handle; `field` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn inc_census_json(
    poset: *const IncPoset,
    field: *const c_char,
    out: *mut *mut c_char,
) -> IncStatus {
    guard(|| {
        let p = &deref(poset)?.0;
        let f = io::parse_field(text(field)?)?;
        let report = verifier::enumerate_preservers(p, f)?;
        write_string(out, serde_json::to_string(&report)?)
    })
}

/// Reproduces one worked example by id, as a JSON report.
///
/// # Safety
/// `id` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn inc_example_json(id: *const c_char, out: *mut *mut c_char) -> IncStatus {
    guard(|| {
        let report = verifier::reproduce_example(text(id)?)?;
        write_string(out, serde_json::to_string(&report)?)
    })
}
