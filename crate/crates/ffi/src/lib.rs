//! C interface to `coopmsr`.
//!
//! Every function returns a [`CmsrStatus`]; on failure a description is
//! available from [`cmsr_last_error`] on the same thread. Symbols cross the
//! boundary as `uint32_t` field elements, nodes laid out back to back
//! (`n * ell` values for a codeword).

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use coopmsr::msrcode::{encode, recover_erasures};
use coopmsr::repair::{check_optimal, repair_bounds, repair_pair, RepairTranscript};
use coopmsr::{CodeParams, Codeword, Error, Fe};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmsrStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    NotPrime = 3,
    FieldTooSmall = 4,
    GuardExceeded = 5,
    BeyondMdsRadius = 6,
    Internal = 7,
    Panic = 8,
}

/// Opaque code parameters.
pub struct CmsrParams(CodeParams);

/// Opaque repair transcript.
pub struct CmsrTranscript {
    transcript: RepairTranscript,
    optimal: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CmsrStatus {
    match e {
        Error::NotPrime(_) => CmsrStatus::NotPrime,
        Error::FieldTooSmall { .. } => CmsrStatus::FieldTooSmall,
        Error::GuardExceeded { .. } => CmsrStatus::GuardExceeded,
        Error::BeyondMdsRadius { .. } => CmsrStatus::BeyondMdsRadius,
        Error::Internal(_) | Error::Singular { .. } | Error::Inconsistent(_) => CmsrStatus::Internal,
        _ => CmsrStatus::InvalidArgument,
    }
}

enum Fail {
    Null,
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CmsrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CmsrStatus::Ok,
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            CmsrStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic inside coopmsr".into());
            CmsrStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null);
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null);
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn write<T>(p: *mut T, v: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    p.write(v);
    Ok(())
}

fn check_len(what: &str, got: usize, want: u64) -> Result<(), Fail> {
    if got as u64 != want {
        return Err(Error::Dimension(format!("{what} holds {got} symbols, expected {want}")).into());
    }
    Ok(())
}

fn elems(params: &CodeParams, xs: &[u32]) -> Result<Vec<Fe>, Fail> {
    Ok(xs.iter().map(|&x| params.field().try_elem(x as u64)).collect::<Result<_, _>>()?)
}

fn codeword(params: &CodeParams, xs: &[u32]) -> Result<Codeword, Fail> {
    params.check_materializable()?;
    check_len("codeword", xs.len(), params.n() as u64 * params.ell())?;
    let ell = params.ell() as usize;
    let nodes = xs.chunks(ell).map(|c| elems(params, c)).collect::<Result<Vec<_>, _>>()?;
    Ok(Codeword::new(nodes)?)
}

/// Message for the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn cmsr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Code with default points over GF(`prime`). Free with [`cmsr_params_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn cmsr_params_new(n: usize, k: usize, prime: u64, out: *mut *mut CmsrParams) -> CmsrStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null);
        }
        let p = CodeParams::new(n, k, prime)?;
        write(out, Box::into_raw(Box::new(CmsrParams(p))))
    })
}

/// # Safety
/// `params` must come from [`cmsr_params_new`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn cmsr_params_free(params: *mut CmsrParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Writes `r`, `m` and `ell`; any output pointer may be NULL.
///
/// # Safety
/// `params` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cmsr_params_info(params: *const CmsrParams, r: *mut usize, m: *mut usize, ell: *mut u64) -> CmsrStatus {
    guard(|| {
        let p = &as_ref(params)?.0;
        if !r.is_null() {
            r.write(p.r());
        }
        if !m.is_null() {
            m.write(p.m());
        }
        if !ell.is_null() {
            ell.write(p.ell());
        }
        Ok(())
    })
}

/// Lower bounds on repair bandwidth and access for two failures.
///
/// # Safety
/// `params` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cmsr_repair_bounds(params: *const CmsrParams, gamma: *mut u64, gamma_a: *mut u64) -> CmsrStatus {
    guard(|| {
        let (g, ga) = repair_bounds(&as_ref(params)?.0);
        write(gamma, g)?;
        write(gamma_a, ga)
    })
}

/// Systematic encoding: `data` holds `k * ell` symbols, `out` receives `n * ell`.
///
/// # Safety
/// Buffers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn cmsr_encode(
    params: *const CmsrParams,
    data: *const u32,
    data_len: usize,
    out: *mut u32,
    out_len: usize,
) -> CmsrStatus {
    guard(|| {
        let p = &as_ref(params)?.0;
        p.check_materializable()?;
        let ell = p.ell();
        check_len("data", data_len, p.k() as u64 * ell)?;
        check_len("output", out_len, p.n() as u64 * ell)?;
        let data = slice(data, data_len)?;
        let nodes = data.chunks(ell as usize).map(|c| elems(p, c)).collect::<Result<Vec<_>, _>>()?;
        let cw = encode(p, &nodes)?;
        let out = slice_mut(out, out_len)?;
        for (dst, src) in out.iter_mut().zip(cw.nodes().iter().flatten()) {
            *dst = src.value();
        }
        Ok(())
    })
}

/// Fills the erased nodes (1-based, at most `r`) of `codeword` in place.
///
/// # Safety
/// Buffers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn cmsr_decode(
    params: *const CmsrParams,
    codeword: *mut u32,
    len: usize,
    erased: *const usize,
    erased_len: usize,
) -> CmsrStatus {
    guard(|| {
        let p = &as_ref(params)?.0;
        let buf = slice_mut(codeword, len)?;
        let mut cw = self::codeword(p, buf)?;
        recover_erasures(p, &mut cw, slice(erased, erased_len)?)?;
        for (dst, src) in buf.iter_mut().zip(cw.nodes().iter().flatten()) {
            *dst = src.value();
        }
        Ok(())
    })
}

/// Cooperatively repairs nodes `i1 < i2` of `codeword`, reading only what the
/// protocol allows. Each of `first` and `second` receives `ell` symbols.
/// The transcript handle is freed with [`cmsr_transcript_free`]; pass NULL to skip it.
///
/// # Safety
/// Buffers must be valid for the given lengths; `transcript` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn cmsr_repair(
    params: *const CmsrParams,
    codeword: *const u32,
    len: usize,
    i1: usize,
    i2: usize,
    first: *mut u32,
    second: *mut u32,
    transcript: *mut *mut CmsrTranscript,
) -> CmsrStatus {
    guard(|| {
        let p = &as_ref(params)?.0;
        let cw = self::codeword(p, slice(codeword, len)?)?;
        let ell = p.ell() as usize;
        let (first, second) = (slice_mut(first, ell)?, slice_mut(second, ell)?);
        let out = repair_pair(p, &cw, i1, i2)?;
        for (dst, src) in first.iter_mut().zip(&out.first).chain(second.iter_mut().zip(&out.second)) {
            *dst = src.value();
        }
        if !transcript.is_null() {
            let optimal = check_optimal(&out.transcript, p).optimal;
            transcript.write(Box::into_raw(Box::new(CmsrTranscript { transcript: out.transcript, optimal })));
        }
        Ok(())
    })
}

/// Symbols moved and symbols read by helpers; `optimal` is 1 when both meet their bounds.
///
/// # Safety
/// `t` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cmsr_transcript_counts(t: *const CmsrTranscript, gamma: *mut u64, gamma_a: *mut u64, optimal: *mut i32) -> CmsrStatus {
    guard(|| {
        let t = as_ref(t)?;
        if !gamma.is_null() {
            gamma.write(t.transcript.gamma);
        }
        if !gamma_a.is_null() {
            gamma_a.write(t.transcript.gamma_a);
        }
        if !optimal.is_null() {
            optimal.write(t.optimal as i32);
        }
        Ok(())
    })
}

/// Transcript as a JSON string, released with [`cmsr_string_free`].
///
/// # Safety
/// `t` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cmsr_transcript_to_json(t: *const CmsrTranscript, out: *mut *mut c_char) -> CmsrStatus {
    guard(|| {
        let t = as_ref(t)?;
        let s = serde_json::to_string(&t.transcript).map_err(|e| Error::Internal(e.to_string()))?;
        let c = CString::new(s).map_err(|e| Error::Internal(e.to_string()))?;
        write(out, c.into_raw())
    })
}

/// # Safety
/// `t` must come from [`cmsr_repair`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn cmsr_transcript_free(t: *mut CmsrTranscript) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn cmsr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
