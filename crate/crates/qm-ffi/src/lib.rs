//! C ABI over the quadratic-module toolkit.
//!
//! Conventions: opaque handles (`QmGram`, `QmModule`) created and destroyed
//! by this library; every fallible call returns a `QmStatus`; the message for
//! the most recent error on the current thread is available through
//! `qm_last_error`. All returned strings are UTF-8, NUL-terminated, and must
//! be released with `qm_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use qm_core::blocks::decompose;
use qm_core::discriminant::discriminant_module;
use qm_core::error::Error;
use qm_core::fqm::FiniteQuadraticModule;
use qm_core::guards::Guards;
use qm_core::io;
use qm_core::lattice::GramMatrix;
use qm_core::modular::central_charge;
use qm_core::realize::{realize, RealizationCache};

/// Opaque handle to a validated Gram matrix.
pub struct QmGram(GramMatrix);

/// Opaque handle to a finite quadratic module.
pub struct QmModule(FiniteQuadraticModule);

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum QmStatus {
    Ok = 0,
    /// Invalid input (parse failure, bad matrix, bad module data).
    InvalidArgument = 1,
    /// A size guard rejected the operation.
    GuardExceeded = 2,
    /// The module is degenerate.
    Degenerate = 3,
    /// No realization found within the search budget.
    NotFound = 4,
    /// Internal invariant violation.
    Internal = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(e: &Error) -> QmStatus {
    let status = match e {
        Error::SizeGuardExceeded { .. } => QmStatus::GuardExceeded,
        Error::DegenerateModule => QmStatus::Degenerate,
        Error::RealizationNotFound(_) => QmStatus::NotFound,
        Error::Internal(_) => QmStatus::Internal,
        _ => QmStatus::InvalidArgument,
    };
    let msg = CString::new(e.to_string()).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
    status
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn guards_with(limit: u64) -> Guards {
    if limit == 0 {
        Guards::default()
    } else {
        Guards {
            max_module_order: limit,
            max_enum_order: limit,
        }
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(std::ptr::null_mut())
}

/// Message of the most recent error on this thread, or NULL when the last
/// call succeeded. The returned string must be freed with `qm_string_free`.
#[no_mangle]
pub extern "C" fn qm_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|m| m.clone().into_raw())
            .unwrap_or(std::ptr::null_mut())
    })
}

/// Release a string returned by this library. NULL is ignored.
#[no_mangle]
pub extern "C" fn qm_string_free(s: *mut c_char) {
    if !s.is_null() {
        unsafe {
            drop(CString::from_raw(s));
        }
    }
}

/// Build a Gram matrix from `rank`×`rank` entries in row-major order.
/// On success stores a new handle in `out`.
///
/// # Safety
/// `entries` must point to `rank*rank` readable values and `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qm_gram_new(
    entries: *const i64,
    rank: usize,
    out: *mut *mut QmGram,
) -> QmStatus {
    clear_error();
    if (entries.is_null() && rank > 0) || out.is_null() {
        return set_error(&Error::Parse("null pointer argument".into()));
    }
    let vals = std::slice::from_raw_parts(entries, rank * rank);
    let rows: Vec<Vec<num_bigint::BigInt>> = (0..rank)
        .map(|i| (0..rank).map(|j| vals[i * rank + j].into()).collect())
        .collect();
    match GramMatrix::new(rows) {
        Ok(k) => {
            *out = Box::into_raw(Box::new(QmGram(k)));
            QmStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Parse a Gram matrix from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qm_gram_from_json(
    json: *const c_char,
    out: *mut *mut QmGram,
) -> QmStatus {
    clear_error();
    if json.is_null() || out.is_null() {
        return set_error(&Error::Parse("null pointer argument".into()));
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => return set_error(&Error::Parse("JSON is not valid UTF-8".into())),
    };
    let parsed = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("bad JSON: {e}")))
        .and_then(|v| io::gram_from_json(&v));
    match parsed {
        Ok(k) => {
            *out = Box::into_raw(Box::new(QmGram(k)));
            QmStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Release a Gram handle. NULL is ignored.
///
/// # Safety
/// `gram` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qm_gram_free(gram: *mut QmGram) {
    if !gram.is_null() {
        drop(Box::from_raw(gram));
    }
}

/// Signed determinant as a decimal string.
///
/// # Safety
/// `gram` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qm_gram_determinant(gram: *const QmGram) -> *mut c_char {
    to_c_string((*gram).0.determinant().to_string())
}

/// Signature of the Gram matrix: positive and negative eigenvalue counts.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_gram_signature(
    gram: *const QmGram,
    pos: *mut usize,
    neg: *mut usize,
) -> QmStatus {
    clear_error();
    let (p, n) = (*gram).0.signature();
    *pos = p;
    *neg = n;
    QmStatus::Ok
}

/// Discriminant module of a Gram matrix.
///
/// # Safety
/// `gram` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qm_discriminant(
    gram: *const QmGram,
    out: *mut *mut QmModule,
) -> QmStatus {
    clear_error();
    match discriminant_module(&(*gram).0) {
        Ok(d) => {
            *out = Box::into_raw(Box::new(QmModule(d.module)));
            QmStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Parse a module from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qm_module_from_json(
    json: *const c_char,
    out: *mut *mut QmModule,
) -> QmStatus {
    clear_error();
    if json.is_null() || out.is_null() {
        return set_error(&Error::Parse("null pointer argument".into()));
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => return set_error(&Error::Parse("JSON is not valid UTF-8".into())),
    };
    let parsed = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("bad JSON: {e}")))
        .and_then(|v| io::fqm_from_json(&v));
    match parsed {
        Ok(m) => {
            *out = Box::into_raw(Box::new(QmModule(m)));
            QmStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Release a module handle. NULL is ignored.
///
/// # Safety
/// `module` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qm_module_free(module: *mut QmModule) {
    if !module.is_null() {
        drop(Box::from_raw(module));
    }
}

/// Group order as a decimal string.
///
/// # Safety
/// `module` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qm_module_order(module: *const QmModule) -> *mut c_char {
    to_c_string((*module).0.order().to_string())
}

/// JSON form of the module.
///
/// # Safety
/// `module` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qm_module_to_json(module: *const QmModule) -> *mut c_char {
    to_c_string(io::fqm_to_json(&(*module).0).to_string())
}

/// Decide isomorphism. `guard` bounds the group order (0 = default).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_module_is_isomorphic(
    a: *const QmModule,
    b: *const QmModule,
    guard: u64,
    result: *mut bool,
) -> QmStatus {
    clear_error();
    match (*a).0.is_isomorphic(&(*b).0, &guards_with(guard)) {
        Ok(w) => {
            *result = w.is_some();
            QmStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Central charge mod 8 of a nondegenerate module.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_module_central_charge(
    module: *const QmModule,
    guard: u64,
    out: *mut u8,
) -> QmStatus {
    clear_error();
    match central_charge(&(*module).0, &guards_with(guard)) {
        Ok(c) => {
            *out = c;
            QmStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Block decomposition as a JSON string stored in `out`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_module_decompose_json(
    module: *const QmModule,
    guard: u64,
    out: *mut *mut c_char,
) -> QmStatus {
    clear_error();
    match decompose(&(*module).0, &guards_with(guard)) {
        Ok(blocks) => {
            *out = to_c_string(io::blocks_to_json(&blocks).to_string());
            QmStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Realizing even lattice as Gram-matrix JSON stored in `out`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_module_realize_json(
    module: *const QmModule,
    guard: u64,
    out: *mut *mut c_char,
) -> QmStatus {
    clear_error();
    let mut cache = RealizationCache::in_memory();
    match realize(&(*module).0, &guards_with(guard), &mut cache) {
        Ok(k) => {
            *out = to_c_string(io::gram_to_json(&k).to_string());
            QmStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    unsafe fn own_string(p: *mut c_char) -> String {
        assert!(!p.is_null());
        let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
        qm_string_free(p);
        s
    }

    #[test]
    fn gram_to_module_round_trip() {
        unsafe {
            let entries = [2i64, 1, 1, 2];
            let mut gram: *mut QmGram = ptr::null_mut();
            assert!(qm_gram_new(entries.as_ptr(), 2, &mut gram) == QmStatus::Ok);
            assert_eq!(own_string(qm_gram_determinant(gram)), "3");
            let (mut p, mut n) = (0usize, 0usize);
            assert!(qm_gram_signature(gram, &mut p, &mut n) == QmStatus::Ok);
            assert_eq!((p, n), (2, 0));

            let mut module: *mut QmModule = ptr::null_mut();
            assert!(qm_discriminant(gram, &mut module) == QmStatus::Ok);
            assert_eq!(own_string(qm_module_order(module)), "3");

            let mut c = 0u8;
            assert!(qm_module_central_charge(module, 0, &mut c) == QmStatus::Ok);
            assert_eq!(c, 2);

            let json = own_string(qm_module_to_json(module));
            let mut reparsed: *mut QmModule = ptr::null_mut();
            let cjson = CString::new(json).unwrap();
            assert!(qm_module_from_json(cjson.as_ptr(), &mut reparsed) == QmStatus::Ok);
            let mut iso = false;
            assert!(qm_module_is_isomorphic(module, reparsed, 0, &mut iso) == QmStatus::Ok);
            assert!(iso);

            let mut blocks: *mut c_char = ptr::null_mut();
            assert!(qm_module_decompose_json(module, 0, &mut blocks) == QmStatus::Ok);
            assert!(own_string(blocks).contains("AOdd"));

            let mut lattice: *mut c_char = ptr::null_mut();
            assert!(qm_module_realize_json(module, 0, &mut lattice) == QmStatus::Ok);
            assert!(own_string(lattice).contains("rank"));

            qm_module_free(reparsed);
            qm_module_free(module);
            qm_gram_free(gram);
        }
    }

    #[test]
    fn errors_set_status_and_message() {
        unsafe {
            // odd diagonal is invalid
            let entries = [1i64];
            let mut gram: *mut QmGram = ptr::null_mut();
            assert!(qm_gram_new(entries.as_ptr(), 1, &mut gram) == QmStatus::InvalidArgument);
            let msg = own_string(qm_last_error());
            assert!(msg.contains("odd"), "message was: {msg}");

            // degenerate module is reported as such
            let cjson = CString::new(r#"{"orders":[2],"q":["1/2"],"b":[]}"#).unwrap();
            let mut module: *mut QmModule = ptr::null_mut();
            assert!(qm_module_from_json(cjson.as_ptr(), &mut module) == QmStatus::Ok);
            let mut c = 0u8;
            assert!(
                qm_module_central_charge(module, 0, &mut c) == QmStatus::Degenerate
            );
            qm_module_free(module);

            // guard exceeded
            let cjson = CString::new(r#"{"orders":[3],"q":["1/3"],"b":[]}"#).unwrap();
            let mut module: *mut QmModule = ptr::null_mut();
            assert!(qm_module_from_json(cjson.as_ptr(), &mut module) == QmStatus::Ok);
            let mut out: *mut c_char = ptr::null_mut();
            assert!(qm_module_decompose_json(module, 2, &mut out) == QmStatus::GuardExceeded);
            qm_module_free(module);

            // success clears the per-thread error
            let entries = [2i64];
            let mut gram: *mut QmGram = ptr::null_mut();
            assert!(qm_gram_new(entries.as_ptr(), 1, &mut gram) == QmStatus::Ok);
            assert!(qm_last_error().is_null());
            qm_gram_free(gram);
        }
    }
}
