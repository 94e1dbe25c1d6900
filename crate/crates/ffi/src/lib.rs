//! C ABI over `grandsmall`.
//!
//! Handles are opaque and owned by the caller; free each with its `_free`
//! function. Every fallible call returns a [`GsStatus`]; on failure the
//! message is available from [`gs_last_error_message`] on the same thread.
//! Panics are caught at the boundary and reported as `GS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use grandsmall::multipliers::{apply, apply_oracle, SymbolDoc};
use grandsmall::norms::{grand_norm, lp_norm, small_norm, GrandParams, GridSpec, SmallParams, SolverOptions};
use grandsmall::{DualFunction, Error, GFunction, GroupSpec, Symbol};
use num_complex::Complex64;

/// A finite abelian group `Z_{n1} x ... x Z_{nk}`.
pub struct GsGroup(GroupSpec);

/// A complex function on a group (or on its dual, which shares the indexing).
pub struct GsFunction(GFunction);

/// A bilinear multiplier symbol on `Ĝ x Ĝ`.
pub struct GsSymbol(Symbol);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidGroup = 2,
    Dimension = 3,
    SpecMismatch = 4,
    NonFinite = 5,
    InvalidParameter = 6,
    Inadmissible = 7,
    Parse = 8,
    Panic = 9,
}

/// Geometric ε-grid: `count` points from `min_fraction*(p-1)` to `p-1`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GsGrid {
    pub count: usize,
    pub min_fraction: f64,
}

/// Small-norm bracket. `converged` is false when the gap exceeds the tolerance.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GsCertificate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GsStatus {
    match e {
        Error::InvalidGroup(_) => GsStatus::InvalidGroup,
        Error::Dimension { .. } => GsStatus::Dimension,
        Error::SpecMismatch(..) => GsStatus::SpecMismatch,
        Error::NonFinite(_) => GsStatus::NonFinite,
        Error::NotUnit(..) | Error::InvalidParameter(_) | Error::ZeroDenominator(_) | Error::UnknownCheck(_) => {
            GsStatus::InvalidParameter
        }
        Error::Inadmissible(_) => GsStatus::Inadmissible,
        Error::Parse(_) => GsStatus::Parse,
    }
}

struct Fail(GsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(GsStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GsStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("panic: {msg}"));
            GsStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<T>(p: *mut *mut T, v: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null("out"));
    }
    *p = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(GsStatus::Parse, format!("{what} is not UTF-8")))
}

/// `re` is required; `im` may be null for real data.
unsafe fn complex_arg(re: *const f64, im: *const f64, len: usize) -> Result<Vec<Complex64>, Fail> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if re.is_null() {
        return Err(null("re"));
    }
    let re = std::slice::from_raw_parts(re, len);
    let im = (!im.is_null()).then(|| std::slice::from_raw_parts(im, len));
    Ok((0..len).map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i]))).collect())
}

fn grid(g: GsGrid) -> GridSpec {
    GridSpec { count: g.count, min_fraction: g.min_fraction }
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn gs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a spec such as `"Z4xZ4"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_group_parse(spec: *const c_char, out_group: *mut *mut GsGroup) -> GsStatus {
    guard(|| {
        let g: GroupSpec = str_arg(spec, "spec")?.parse()?;
        out(out_group, GsGroup(g))
    })
}

/// Order of the group, 0 for a null handle.
///
/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gs_group_order(group: *const GsGroup) -> usize {
    group.as_ref().map_or(0, |g| g.0.order())
}

/// # Safety
/// `group` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_group_free(group: *mut GsGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Function with `len == order` values in row-major order; `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gs_function_new(
    group: *const GsGroup,
    re: *const f64,
    im: *const f64,
    len: usize,
    out_fn: *mut *mut GsFunction,
) -> GsStatus {
    guard(|| {
        let g = get(group, "group")?;
        let f = GFunction::new(&g.0, complex_arg(re, im, len)?)?;
        out(out_fn, GsFunction(f))
    })
}

/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gs_function_len(f: *const GsFunction) -> usize {
    f.as_ref().map_or(0, |f| f.0.len())
}

/// Copies values out; `len` must equal the function length. `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gs_function_values(f: *const GsFunction, re: *mut f64, im: *mut f64, len: usize) -> GsStatus {
    guard(|| {
        let f = get(f, "function")?;
        if len != f.0.len() {
            return Err(Error::Dimension { expected: f.0.len(), got: len }.into());
        }
        if re.is_null() {
            return Err(null("re"));
        }
        for (i, z) in f.0.values().iter().enumerate() {
            *re.add(i) = z.re;
            if !im.is_null() {
                *im.add(i) = z.im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_function_free(f: *mut GsFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Lebesgue norm under normalized measure; `q` may be `INFINITY`.
///
/// # Safety
/// `f` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_lp_norm(f: *const GsFunction, q: f64, value: *mut f64) -> GsStatus {
    guard(|| {
        let v = lp_norm(&get(f, "function")?.0, q)?;
        *value.as_mut().ok_or_else(|| null("value"))? = v;
        Ok(())
    })
}

/// Grand norm over the geometric grid.
///
/// # Safety
/// `f` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_grand_norm(f: *const GsFunction, p: f64, theta: f64, g: GsGrid, value: *mut f64) -> GsStatus {
    guard(|| {
        let params = GrandParams::geometric(p, theta, grid(g))?;
        let v = grand_norm(&get(f, "function")?.0, &params);
        *value.as_mut().ok_or_else(|| null("value"))? = v;
        Ok(())
    })
}

/// Certified small norm with exponent `p_conj`. `max_iter == 0` and
/// `tol_rel <= 0` select the defaults. A flagged certificate still returns
/// `GS_STATUS_OK`; check `converged`.
///
/// # Safety
/// `f` must be a live handle and `cert` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_small_norm(
    f: *const GsFunction,
    p_conj: f64,
    theta: f64,
    g: GsGrid,
    max_iter: usize,
    tol_rel: f64,
    cert: *mut GsCertificate,
) -> GsStatus {
    guard(|| {
        let params = SmallParams::geometric(p_conj, theta, grid(g))?;
        let mut opts = SolverOptions::default();
        if max_iter > 0 {
            opts.max_iter = max_iter;
        }
        if tol_rel > 0.0 {
            opts.tol_rel = tol_rel;
        }
        let c = small_norm(&get(f, "function")?.0, &params, &opts);
        *cert.as_mut().ok_or_else(|| null("cert"))? = GsCertificate {
            value: c.value,
            lower: c.lower,
            upper: c.upper,
            gap: c.gap,
            iterations: c.iterations,
            converged: c.converged,
        };
        Ok(())
    })
}

/// Constant symbol `a = re + i im`.
///
/// # Safety
/// `group` must be a live handle; `out_sym` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_symbol_constant(group: *const GsGroup, re: f64, im: f64, out_sym: *mut *mut GsSymbol) -> GsStatus {
    guard(|| out(out_sym, GsSymbol(Symbol::constant(&get(group, "group")?.0, Complex64::new(re, im)))))
}

/// Difference symbol `M(s - t)` from `len == order` values of `M` on `Ĝ`.
///
/// # Safety
/// As for [`gs_function_new`].
#[no_mangle]
pub unsafe extern "C" fn gs_symbol_difference(
    group: *const GsGroup,
    re: *const f64,
    im: *const f64,
    len: usize,
    out_sym: *mut *mut GsSymbol,
) -> GsStatus {
    guard(|| {
        let g = get(group, "group")?;
        let m = DualFunction::new(&g.0, complex_arg(re, im, len)?)?;
        out(out_sym, GsSymbol(Symbol::difference(&m)))
    })
}

/// Dense symbol from `len == order^2` values, index `s * order + t`.
///
/// # Safety
/// As for [`gs_function_new`].
#[no_mangle]
pub unsafe extern "C" fn gs_symbol_general(
    group: *const GsGroup,
    re: *const f64,
    im: *const f64,
    len: usize,
    out_sym: *mut *mut GsSymbol,
) -> GsStatus {
    guard(|| {
        let g = &get(group, "group")?.0;
        let values = DualFunction::new(&g.product(g), complex_arg(re, im, len)?)?;
        out(out_sym, GsSymbol(Symbol::general(g, values)?))
    })
}

/// Symbol from its JSON document (`{spec, structure, values?}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_sym` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_symbol_from_json(json: *const c_char, out_sym: *mut *mut GsSymbol) -> GsStatus {
    guard(|| {
        let doc: SymbolDoc = serde_json::from_str(str_arg(json, "json")?).map_err(|e| Fail(GsStatus::Parse, e.to_string()))?;
        out(out_sym, GsSymbol(doc.to_symbol()?))
    })
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_symbol_free(m: *mut GsSymbol) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `B_m(f, g)`; `oracle` forces the literal triple sum.
///
/// # Safety
/// All handles live; `out_fn` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_apply(
    m: *const GsSymbol,
    f: *const GsFunction,
    g: *const GsFunction,
    oracle: bool,
    out_fn: *mut *mut GsFunction,
) -> GsStatus {
    guard(|| {
        let (m, f, g) = (&get(m, "symbol")?.0, &get(f, "f")?.0, &get(g, "g")?.0);
        let b = if oracle { apply_oracle(m, f, g)? } else { apply(m, f, g)? };
        out(out_fn, GsFunction(b))
    })
}
