//! C ABI for the seminorm library.
//!
//! Matrices and contexts are opaque handles created and released by this
//! library. Matrix data crosses the boundary as row-major interleaved
//! `(re, im)` doubles. Every fallible call returns an [`SnStatus`]; the
//! message of the last failure on the calling thread is available from
//! [`sn_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use seminorm::error::Error;
use seminorm::inequalities::{check, Operands, TheoremId};
use seminorm::linalg::{ComplexMatrix, C64};
use seminorm::numrange::{crawford_number, numerical_radius, SweepOptions};
use seminorm::semihilbert::SemiHilbertContext;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotSquare = 3,
    DimensionMismatch = 4,
    NonFinite = 5,
    NotHermitian = 6,
    NotPsd = 7,
    ZeroOperator = 8,
    ConvergenceFailure = 9,
    NotInBa = 10,
    ConditionNotMet = 11,
    UnknownTheorem = 12,
    Panic = 13,
}

impl From<&Error> for SnStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NotSquare { .. } => SnStatus::NotSquare,
            Error::DimensionMismatch { .. } | Error::BadShape { .. } => SnStatus::DimensionMismatch,
            Error::NonFinite => SnStatus::NonFinite,
            Error::NotHermitian { .. } => SnStatus::NotHermitian,
            Error::NotPsd { .. } => SnStatus::NotPsd,
            Error::ZeroOperator => SnStatus::ZeroOperator,
            Error::ConvergenceFailure { .. } => SnStatus::ConvergenceFailure,
            Error::NotInBA { .. } => SnStatus::NotInBa,
            Error::ConditionNotMet { .. } => SnStatus::ConditionNotMet,
            Error::UnknownTheorem(_) => SnStatus::UnknownTheorem,
            Error::UnknownKind(_) | Error::InvalidOptions(_) | Error::DegenerateSample => SnStatus::InvalidArgument,
        }
    }
}

/// Opaque dense complex matrix.
pub struct SnMatrix {
    inner: ComplexMatrix,
}

/// Opaque semi-Hilbertian context built from a PSD matrix `A`.
pub struct SnContext {
    inner: SemiHilbertContext,
}

/// The four A-quantities of an operator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SnQuantities {
    pub seminorm: f64,
    pub w: f64,
    pub c: f64,
    pub m: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(SnStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(SnStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SnStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure and converts panics to [`SnStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            SnStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            SnStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = value;
    Ok(())
}

/// Creates a `rows × cols` matrix from `2·rows·cols` interleaved doubles.
///
/// # Safety
/// `data` must point to `2·rows·cols` readable doubles and `out` must be a
/// valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn sn_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut SnMatrix,
) -> SnStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let len = rows
            .checked_mul(cols)
            .and_then(|k| k.checked_mul(2))
            .ok_or_else(|| Failure(SnStatus::InvalidArgument, "matrix size overflows".into()))?;
        if len == 0 {
            return Err(Failure(SnStatus::InvalidArgument, "matrix must have at least one entry".into()));
        }
        let raw = std::slice::from_raw_parts(data, len);
        let entries = raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        let m = ComplexMatrix::from_row_major(rows, cols, entries)?;
        store(out, SnMatrix { inner: m })
    })
}

/// Releases a matrix. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sn_matrix_free(m: *mut SnMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Row count, or 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sn_matrix_rows(m: *const SnMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.rows())
}

/// Column count, or 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sn_matrix_cols(m: *const SnMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.cols())
}

/// Copies the entries as interleaved doubles into `out`, which holds `len`
/// doubles; `len` must be at least `2·rows·cols`.
///
/// # Safety
/// `m` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sn_matrix_copy_data(m: *const SnMatrix, out: *mut f64, len: usize) -> SnStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        if out.is_null() {
            return Err(null("output buffer"));
        }
        let data = m.inner.as_slice();
        if len < 2 * data.len() {
            return Err(Failure(
                SnStatus::InvalidArgument,
                format!("buffer holds {len} doubles, need {}", 2 * data.len()),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(out, 2 * data.len());
        for (pair, z) in dst.chunks_exact_mut(2).zip(data) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// Builds a context from the PSD matrix `a`. A positive finite `rank_tol`
/// replaces the default eigenvalue cutoff; any other value keeps it.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn sn_context_new(a: *const SnMatrix, rank_tol: f64, out: *mut *mut SnContext) -> SnStatus {
    guard(|| {
        let a = deref(a, "A")?;
        let tol = (rank_tol.is_finite() && rank_tol > 0.0).then_some(rank_tol);
        let ctx = SemiHilbertContext::new(&a.inner, tol)?;
        store(out, SnContext { inner: ctx })
    })
}

/// Releases a context. Null is ignored.
///
/// # Safety
/// `ctx` must be null or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sn_context_free(ctx: *mut SnContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Numerical rank of `A`, or 0 for null.
///
/// # Safety
/// `ctx` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sn_context_rank(ctx: *const SnContext) -> usize {
    ctx.as_ref().map_or(0, |c| c.inner.rank())
}

/// Order of `A`, or 0 for null.
///
/// # Safety
/// `ctx` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sn_context_dim(ctx: *const SnContext) -> usize {
    ctx.as_ref().map_or(0, |c| c.inner.dim())
}

/// Membership of `t` in `B_A` and its residual.
///
/// # Safety
/// Handles must be live; `member` and `residual` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn_in_ba(
    ctx: *const SnContext,
    t: *const SnMatrix,
    member: *mut bool,
    residual: *mut f64,
) -> SnStatus {
    guard(|| {
        let m = deref(ctx, "context")?.inner.membership(&deref(t, "T")?.inner)?;
        write(member, m.member)?;
        write(residual, m.residual)
    })
}

/// `T♯ = A†T*A`. Fails with [`SnStatus::NotInBa`] outside `B_A`.
///
/// # Safety
/// Handles must be live and `out` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn sn_sharp(ctx: *const SnContext, t: *const SnMatrix, out: *mut *mut SnMatrix) -> SnStatus {
    guard(|| {
        let m = deref(ctx, "context")?.inner.sharp(&deref(t, "T")?.inner)?;
        store(out, SnMatrix { inner: m })
    })
}

/// The r×r reduced operator `T̃`.
///
/// # Safety
/// Handles must be live and `out` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn sn_tilde(ctx: *const SnContext, t: *const SnMatrix, out: *mut *mut SnMatrix) -> SnStatus {
    guard(|| {
        let m = deref(ctx, "context")?.inner.tilde(&deref(t, "T")?.inner)?;
        store(out, SnMatrix { inner: m })
    })
}

/// `‖T‖_A`, `w_A(T)`, `c_A(T)` and `m_A(T)` with the default sweep.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sn_a_quantities(
    ctx: *const SnContext,
    t: *const SnMatrix,
    out: *mut SnQuantities,
) -> SnStatus {
    guard(|| {
        let q = deref(ctx, "context")?.inner.a_quantities(&deref(t, "T")?.inner, &SweepOptions::default())?;
        write(out, SnQuantities { seminorm: q.seminorm, w: q.w, c: q.c, m: q.m })
    })
}

/// Classical numerical radius of a square matrix.
///
/// # Safety
/// `b` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sn_numerical_radius(b: *const SnMatrix, out: *mut f64) -> SnStatus {
    guard(|| write(out, numerical_radius(&deref(b, "matrix")?.inner, &SweepOptions::default())?))
}

/// Classical Crawford number of a square matrix.
///
/// # Safety
/// `b` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sn_crawford_number(b: *const SnMatrix, out: *mut f64) -> SnStatus {
    guard(|| write(out, crawford_number(&deref(b, "matrix")?.inner, &SweepOptions::default())?))
}

/// Evaluates one chain and returns its report as a JSON string that must be
/// released with [`sn_string_free`]. `s` and `x` may be null when the chain
/// does not use them. A `tol` that is not finite and non-negative selects the
/// default.
///
/// # Safety
/// `theorem_id` must be a NUL-terminated string, non-null handles must be
/// live, and `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn_check_json(
    ctx: *const SnContext,
    theorem_id: *const c_char,
    t: *const SnMatrix,
    s: *const SnMatrix,
    x: *const SnMatrix,
    tol: f64,
    out_json: *mut *mut c_char,
) -> SnStatus {
    guard(|| {
        let ctx = deref(ctx, "context")?;
        if theorem_id.is_null() {
            return Err(null("theorem id"));
        }
        let name = CStr::from_ptr(theorem_id)
            .to_str()
            .map_err(|_| Failure(SnStatus::InvalidArgument, "theorem id is not UTF-8".into()))?;
        let id: TheoremId = name.parse()?;
        let opt = |p: *const SnMatrix| p.as_ref().map(|m| m.inner.clone());
        let ops = Operands { t: deref(t, "T")?.inner.clone(), s: opt(s), x: opt(x) };
        let tol = if tol.is_finite() && tol >= 0.0 { tol } else { seminorm::inequalities::DEFAULT_TOL };
        let report = check(&ctx.inner, id, &ops, &SweepOptions::default(), tol)?;
        let json = serde_json::to_string(&report).map_err(|e| Failure(SnStatus::InvalidArgument, e.to_string()))?;
        let c = CString::new(json).map_err(|e| Failure(SnStatus::InvalidArgument, e.to_string()))?;
        if out_json.is_null() {
            return Err(null("output pointer"));
        }
        *out_json = c.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sn_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(SnStatus::from(&Error::NotInBA { residual: 1.0 }), SnStatus::NotInBa);
        assert_eq!(SnStatus::from(&Error::NotPsd { eigenvalue: -1.0 }), SnStatus::NotPsd);
        assert_eq!(SnStatus::from(&Error::UnknownTheorem("x".into())), SnStatus::UnknownTheorem);
    }

    #[test]
    fn panics_become_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, SnStatus::Panic);
        let msg = unsafe { CStr::from_ptr(sn_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
        assert_eq!(guard(|| Ok(())), SnStatus::Ok);
        assert!(unsafe { CStr::from_ptr(sn_last_error()) }.to_bytes().is_empty());
    }
}
