//! C ABI over the `qseries` engine.
//!
//! Series live behind the opaque `QsSeries` handle. Every function returns a
//! `QsStatus`; on failure `qs_last_error` describes the error for the calling
//! thread. Strings handed out by the library must be released with
//! `qs_string_free`, series with `qs_series_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use qseries::catalog::{self, Catalog};
use qseries::modularity::{find_scaling, robins_check, GEtaList};
use qseries::{Error, PSeries, Rational};

/// Result codes. `QS_STATUS_OK` is zero; everything else is a failure.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    UnknownIdentity = 5,
    NonInvertible = 6,
    BeyondTruncation = 7,
    Math = 8,
    Panic = 9,
}

/// Opaque truncated series.
pub struct QsSeries(PSeries);

/// Output of `qs_modcheck`; valuations are `num/den`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QsModcheck {
    pub valinf_num: i64,
    pub valinf_den: i64,
    pub val0_num: i64,
    pub val0_den: i64,
    pub modular: bool,
}

/// Output of `qs_find_scaling`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QsScaling {
    pub k: i64,
    pub n0: i64,
    pub level: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QsStatus {
    match e {
        Error::Parse { .. } => QsStatus::Parse,
        Error::InvalidArgument(_) | Error::Io(_) => QsStatus::InvalidArgument,
        Error::UnknownIdentity(_) => QsStatus::UnknownIdentity,
        Error::NonInvertible => QsStatus::NonInvertible,
        Error::BeyondTruncation { .. } | Error::InsufficientTruncation { .. } => QsStatus::BeyondTruncation,
        _ => QsStatus::Math,
    }
}

struct Fail(QsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QsStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            QsStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(QsStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(QsStatus::InvalidUtf8, e.to_string()))
}

unsafe fn series<'a>(p: *const QsSeries) -> Result<&'a PSeries, Fail> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| Fail(QsStatus::NullPointer, "null series".into()))
}

fn rational(num: i64, den: i64) -> Result<Rational, Fail> {
    if den == 0 {
        return Err(Fail(QsStatus::InvalidArgument, "zero denominator".into()));
    }
    Ok(Rational::new(num, den))
}

fn order(num: i64, den: i64) -> Result<Rational, Fail> {
    let o = rational(num, den)?;
    if o < Rational::from_integer(1) {
        return Err(Fail(QsStatus::InvalidArgument, format!("order must be at least 1, got {o}")));
    }
    Ok(o)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(QsStatus::NullPointer, "null output pointer".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_series(out: *mut *mut QsSeries, s: PSeries) -> Result<(), Fail> {
    put(out, Box::into_raw(Box::new(QsSeries(s))))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail(QsStatus::Math, e.to_string()))?;
    put(out, c.into_raw())
}

fn builtin() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(catalog::builtin)
}

/// Message for the last failing call on this thread, or "" after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn qs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn qs_series_free(s: *mut QsSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Evaluate an expression to order `order_num/order_den`.
///
/// # Safety
/// `expr` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_eval(expr: *const c_char, order_num: i64, order_den: i64, out: *mut *mut QsSeries) -> QsStatus {
    guard(|| {
        let e = catalog::parse_expr(text(expr)?)?;
        let s = e.eval(order(order_num, order_den)?)?;
        put_series(out, s)
    })
}

/// Parse series text such as `1 - q + 2q^{3/2} + O(q^4)`.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_series_parse(src: *const c_char, out: *mut *mut QsSeries) -> QsStatus {
    guard(|| put_series(out, PSeries::parse(text(src)?, None)?))
}

/// Text form including the `O(q^N)` term. Free with `qs_string_free`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_series_to_string(s: *const QsSeries, out: *mut *mut c_char) -> QsStatus {
    guard(|| put_string(out, series(s)?.to_string_with_order()))
}

/// Truncation order as `num/den`.
///
/// # Safety
/// `s` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_series_order(s: *const QsSeries, num: *mut i64, den: *mut i64) -> QsStatus {
    guard(|| {
        let o = series(s)?.order();
        put(num, *o.numer())?;
        put(den, *o.denom())
    })
}

/// Coefficient of `q^(exp_num/exp_den)` as a decimal rational string.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_series_coeff(s: *const QsSeries, exp_num: i64, exp_den: i64, out: *mut *mut c_char) -> QsStatus {
    guard(|| {
        let c = series(s)?.coeff(rational(exp_num, exp_den)?)?;
        put_string(out, c.to_string())
    })
}

/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_series_add(a: *const QsSeries, b: *const QsSeries, out: *mut *mut QsSeries) -> QsStatus {
    guard(|| put_series(out, series(a)?.add(series(b)?)))
}

/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_series_mul(a: *const QsSeries, b: *const QsSeries, out: *mut *mut QsSeries) -> QsStatus {
    guard(|| put_series(out, series(a)?.mul(series(b)?)))
}

/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_series_inv(a: *const QsSeries, out: *mut *mut QsSeries) -> QsStatus {
    guard(|| put_series(out, series(a)?.inv()?))
}

/// Check a built-in identity to integer order `order`. `equal` receives the
/// verdict; a mismatch is not an error and its description is left in
/// `qs_last_error`.
///
/// # Safety
/// `id` must be a NUL-terminated string; `equal` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_verify(id: *const c_char, order: i64, equal: *mut bool) -> QsStatus {
    let mut detail = String::new();
    let status = guard(|| {
        let ident = builtin().get(text(id)?)?;
        let rep = catalog::verify(ident, self::order(order, 1)?);
        if let catalog::Outcome::Error(e) = &rep.outcome {
            return Err(Fail(QsStatus::Math, e.clone()));
        }
        detail = rep.outcome.to_string();
        put(equal, rep.outcome.is_equal())
    });
    if status == QsStatus::Ok && !detail.is_empty() {
        set_error(&detail);
    }
    status
}

unsafe fn geta(list: *const c_char, level: i64) -> Result<GEtaList, Fail> {
    Ok(GEtaList::parse(text(list)?, (level > 0).then_some(level))?)
}

/// Robins' criterion for a bracket list `[[N,g,r],...]`. `level <= 0` infers
/// the level as the lcm of the `N`.
///
/// # Safety
/// `list` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_modcheck(list: *const c_char, level: i64, out: *mut QsModcheck) -> QsStatus {
    guard(|| {
        let rep = robins_check(&geta(list, level)?);
        put(
            out,
            QsModcheck {
                valinf_num: *rep.valinf.numer(),
                valinf_den: *rep.valinf.denom(),
                val0_num: *rep.val0.numer(),
                val0_den: *rep.val0.denom(),
                modular: rep.is_modular,
            },
        )
    })
}

/// Least scaling `tau -> k tau` making the list modular.
///
/// # Safety
/// `list` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_find_scaling(list: *const c_char, level: i64, out: *mut QsScaling) -> QsStatus {
    guard(|| {
        let s = find_scaling(&geta(list, level)?);
        put(out, QsScaling { k: s.k, n0: s.n0, level: s.level })
    })
}
