//! C ABI over the cmsim toolkit.
//!
//! Objects are opaque heap handles created by `*_new` and released by the
//! matching `*_free`. Every fallible call returns a [`CmsimStatus`]; the
//! message of the last failure on the calling thread is available from
//! [`cmsim_last_error`]. Buffers are caller-owned and passed as pointer plus
//! length; a length that differs from the expected one is an error, never a
//! partial write. Bits are one value (0 or 1) per byte.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cmsim::lattice::{quantize, LatticeDef, NestedLatticePair};
use cmsim::shaping::{Shaper, ShaperKind};
use cmsim::voronoi::{OffsetMode, VoronoiCode};
use cmsim::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    Infeasible = 4,
    /// A sequence or point is not a valid codeword of the object.
    InvalidInput = 5,
    Internal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CmsimStatus {
    match e {
        Error::LengthMismatch { .. } | Error::DimensionMismatch { .. } => CmsimStatus::LengthMismatch,
        Error::Infeasible(_) => CmsimStatus::Infeasible,
        Error::CompositionViolation | Error::IndexOutOfRange(_) | Error::EnergyViolation { .. } => {
            CmsimStatus::InvalidInput
        }
        _ => CmsimStatus::InvalidArgument,
    }
}

/// Run `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (CmsimStatus, String)>) -> CmsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CmsimStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            CmsimStatus::Internal
        }
    }
}

fn lift<T>(r: cmsim::Result<T>) -> Result<T, (CmsimStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (CmsimStatus, String) {
    (CmsimStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (CmsimStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (CmsimStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, want: usize, what: &str) -> Result<&'a [T], (CmsimStatus, String)> {
    if len != want {
        return Err((CmsimStatus::LengthMismatch, format!("{what}: expected {want} entries, got {len}")));
    }
    if p.is_null() {
        return if want == 0 { Ok(&[]) } else { Err(null(what)) };
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, want: usize, what: &str) -> Result<&'a mut [T], (CmsimStatus, String)> {
    if len != want {
        return Err((CmsimStatus::LengthMismatch, format!("{what}: expected {want} entries, got {len}")));
    }
    if p.is_null() {
        return if want == 0 { Ok(&mut []) } else { Err(null(what)) };
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (CmsimStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(p: *mut T, v: T, what: &str) -> Result<(), (CmsimStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    *p = v;
    Ok(())
}

/// NUL-terminated message of the last failed call on this thread; valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cmsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cmsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Nearest point of a built-in lattice (`Z<n>`, `D<n>`, `E8`, `L24`, `RL24`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `y` and `out` must point to `dim`
/// readable resp. writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cmsim_quantize(name: *const c_char, y: *const f64, out: *mut f64, dim: usize) -> CmsimStatus {
    guard(|| {
        let lat = lift(LatticeDef::builtin(text(name, "name")?))?;
        let y = slice(y, dim, lat.dim(), "y")?;
        let out = slice_mut(out, dim, lat.dim(), "out")?;
        out.copy_from_slice(&lift(quantize(&lat, y))?);
        Ok(())
    })
}

/// Transmission rate in bits per two dimensions of a named preset.
///
/// # Safety
/// `preset` must be NUL-terminated; `rate` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cmsim_compute_rate(preset: *const c_char, rate: *mut f64) -> CmsimStatus {
    guard(|| {
        let cfg = lift(cmsim::chains::preset(text(preset, "preset")?))?;
        let r = lift(cmsim::chains::compute_rate(&cfg))?;
        write_out(rate, r.value(), "rate")
    })
}

/// Opaque Voronoi constellation.
pub struct CmsimVoronoi(VoronoiCode);

/// Build the Voronoi code of a pair such as `Z24/8RL24` with q = n. `offset`
/// is `generic`, `half-basis` or NULL for the default (generic).
///
/// # Safety
/// `pair` and a non-null `offset` must be NUL-terminated; `out` must be
/// writable. The handle is released with [`cmsim_voronoi_free`].
#[no_mangle]
pub unsafe extern "C" fn cmsim_voronoi_new(
    pair: *const c_char,
    offset: *const c_char,
    out: *mut *mut CmsimVoronoi,
) -> CmsimStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = lift(NestedLatticePair::builtin(text(pair, "pair")?))?;
        let mode = if offset.is_null() { OffsetMode::Generic } else { lift(OffsetMode::parse(text(offset, "offset")?))? };
        let n = p.dim();
        let code = lift(VoronoiCode::new(p, n, mode))?;
        *out = Box::into_raw(Box::new(CmsimVoronoi(code)));
        Ok(())
    })
}

/// # Safety
/// `code` must come from [`cmsim_voronoi_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cmsim_voronoi_free(code: *mut CmsimVoronoi) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Label length k, LRB count q and dimension n.
///
/// # Safety
/// `code` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cmsim_voronoi_params(
    code: *const CmsimVoronoi,
    k: *mut usize,
    q: *mut usize,
    dim: *mut usize,
) -> CmsimStatus {
    guard(|| {
        let c = &handle(code, "code")?.0;
        write_out(k, c.k(), "k")?;
        write_out(q, c.q(), "q")?;
        write_out(dim, c.dim(), "dim")
    })
}

/// Constellation point of a k-bit label.
///
/// # Safety
/// `bits` holds `n_bits` bytes, `out` has room for `n_out` doubles.
#[no_mangle]
pub unsafe extern "C" fn cmsim_voronoi_encode(
    code: *const CmsimVoronoi,
    bits: *const u8,
    n_bits: usize,
    out: *mut f64,
    n_out: usize,
) -> CmsimStatus {
    guard(|| {
        let c = &handle(code, "code")?.0;
        let bits = slice(bits, n_bits, c.k(), "bits")?;
        let out = slice_mut(out, n_out, c.dim(), "out")?;
        lift(c.encode_into(bits, out))
    })
}

/// Label of the nearest constellation point.
///
/// # Safety
/// `y` holds `n_y` doubles, `bits` has room for `n_bits` bytes.
#[no_mangle]
pub unsafe extern "C" fn cmsim_voronoi_decode(
    code: *const CmsimVoronoi,
    y: *const f64,
    n_y: usize,
    bits: *mut u8,
    n_bits: usize,
) -> CmsimStatus {
    guard(|| {
        let c = &handle(code, "code")?.0;
        let y = slice(y, n_y, c.dim(), "y")?;
        let bits = slice_mut(bits, n_bits, c.k(), "bits")?;
        bits.copy_from_slice(&lift(c.decode(y))?);
        Ok(())
    })
}

/// Max-log LLRs of the q least reliable bits (positive favours 0).
///
/// # Safety
/// `y` holds `n_y` doubles, `llr` has room for `n_llr` doubles.
#[no_mangle]
pub unsafe extern "C" fn cmsim_voronoi_lrb_llr(
    code: *const CmsimVoronoi,
    y: *const f64,
    n_y: usize,
    sigma2: f64,
    llr: *mut f64,
    n_llr: usize,
) -> CmsimStatus {
    guard(|| {
        let c = &handle(code, "code")?.0;
        if !(sigma2 > 0.0) {
            return Err((CmsimStatus::InvalidArgument, format!("sigma2 {sigma2} must be positive")));
        }
        let y = slice(y, n_y, c.dim(), "y")?;
        let llr = slice_mut(llr, n_llr, c.q(), "llr")?;
        lift(c.lrb_llr_into(y, sigma2, llr))
    })
}

/// The k − q most reliable bits given decoded LRBs.
///
/// # Safety
/// `y` holds `n_y` doubles, `lrbs` holds `n_lrbs` bytes, `mrbs` has room for
/// `n_mrbs` bytes.
#[no_mangle]
pub unsafe extern "C" fn cmsim_voronoi_mrb_hard_decision(
    code: *const CmsimVoronoi,
    y: *const f64,
    n_y: usize,
    lrbs: *const u8,
    n_lrbs: usize,
    mrbs: *mut u8,
    n_mrbs: usize,
) -> CmsimStatus {
    guard(|| {
        let c = &handle(code, "code")?.0;
        let y = slice(y, n_y, c.dim(), "y")?;
        let lrbs = slice(lrbs, n_lrbs, c.q(), "lrbs")?;
        let mrbs = slice_mut(mrbs, n_mrbs, c.k() - c.q(), "mrbs")?;
        mrbs.copy_from_slice(&lift(c.mrb_hard_decision(y, lrbs))?);
        Ok(())
    })
}

/// Opaque distribution matcher.
pub struct CmsimShaper(Shaper);

/// Matcher of `kind` (`ccdm` or `ess`) for `alphabet` amplitudes,
/// blocklength `n` and `l` input bits.
///
/// # Safety
/// `kind` must be NUL-terminated; `out` must be writable. Release the
/// handle with [`cmsim_shaper_free`].
#[no_mangle]
pub unsafe extern "C" fn cmsim_shaper_new(
    kind: *const c_char,
    alphabet: usize,
    n: usize,
    l: usize,
    out: *mut *mut CmsimShaper,
) -> CmsimStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let kind = lift(ShaperKind::parse(text(kind, "kind")?))?;
        let s = lift(Shaper::build(kind, alphabet, n, l))?;
        *out = Box::into_raw(Box::new(CmsimShaper(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`cmsim_shaper_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cmsim_shaper_free(s: *mut CmsimShaper) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Blocklength N and input length L.
///
/// # Safety
/// `s` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cmsim_shaper_params(s: *const CmsimShaper, n: *mut usize, l: *mut usize) -> CmsimStatus {
    guard(|| {
        let s = &handle(s, "shaper")?.0;
        write_out(n, s.n(), "n")?;
        write_out(l, s.l(), "l")
    })
}

/// L input bits to N amplitude indices (index j is amplitude 2j + 1).
///
/// # Safety
/// `bits` holds `n_bits` bytes, `out` has room for `n_out` bytes.
#[no_mangle]
pub unsafe extern "C" fn cmsim_shaper_encode(
    s: *const CmsimShaper,
    bits: *const u8,
    n_bits: usize,
    out: *mut u8,
    n_out: usize,
) -> CmsimStatus {
    guard(|| {
        let s = &handle(s, "shaper")?.0;
        let bits = slice(bits, n_bits, s.l(), "bits")?;
        let out = slice_mut(out, n_out, s.n(), "out")?;
        out.copy_from_slice(&lift(s.encode(bits))?);
        Ok(())
    })
}

/// N amplitude indices back to L bits; fails with `InvalidInput` when the
/// sequence is not in the matcher's image.
///
/// # Safety
/// `seq` holds `n_seq` bytes, `bits` has room for `n_bits` bytes.
#[no_mangle]
pub unsafe extern "C" fn cmsim_shaper_decode(
    s: *const CmsimShaper,
    seq: *const u8,
    n_seq: usize,
    bits: *mut u8,
    n_bits: usize,
) -> CmsimStatus {
    guard(|| {
        let s = &handle(s, "shaper")?.0;
        let seq = slice(seq, n_seq, s.n(), "seq")?;
        let bits = slice_mut(bits, n_bits, s.l(), "bits")?;
        bits.copy_from_slice(&lift(s.decode(seq))?);
        Ok(())
    })
}
