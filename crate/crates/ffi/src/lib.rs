//! C ABI over the exact series, the walk engine and the sampler.
//!
//! Every entry point returns a [`DiluteStatus`]. On failure the message is
//! kept per thread and read with [`dilute_last_error`]. Strings handed out
//! must be released with [`dilute_string_free`], handles with their own
//! `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dilute_core::cli::{run_selfcheck, Depth};
use dilute_core::montecarlo::{estimate_moments, EnsembleConfig, EntryDist};
use dilute_core::rational::{self, Rational};
use dilute_core::series::{phi_12, phi_22, solve_catalan, solve_moment_series, SeriesParams, TruncatedSeries};
use dilute_core::walks::{exact_moment, MomentParams};
use dilute_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiluteStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside the operation's domain.
    Contract = 2,
    /// Unparsable or inconsistent parameters.
    Config = 3,
    /// Two independent computations disagreed.
    Inconsistency = 4,
    Io = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiluteSeriesKind {
    Moment = 0,
    Catalan = 1,
    Phi12 = 2,
    Phi22 = 3,
}

/// Opaque truncated power series with coefficients polynomial in `u`.
pub struct DiluteSeries {
    inner: TruncatedSeries,
}

/// Opaque `(n, rho, V_2, V_4, ...)` for the exact moment engine.
pub struct DiluteMomentParams {
    inner: MomentParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(DiluteStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Contract(_) => DiluteStatus::Contract,
            Error::Config(_) => DiluteStatus::Config,
            Error::Inconsistency(_) => DiluteStatus::Inconsistency,
            Error::Io(_) => DiluteStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DiluteStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DiluteStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("panic: {msg}"));
            DiluteStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(DiluteStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(DiluteStatus::Config, format!("{what} is not UTF-8")))
}

unsafe fn read_rational(p: *const c_char, what: &str) -> Result<Rational, Failure> {
    Ok(rational::parse(read_str(p, what)?)?)
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| Failure(DiluteStatus::Inconsistency, "string contains nul".into()))?;
    out.write(c.into_raw());
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn dilute_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn dilute_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Solves a series up to `order`. `u` is an optional rational such as
/// `"1/10"`; null keeps `u` symbolic. `u` is only accepted for the moment
/// series.
///
/// # Safety
/// `u` must be null or a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dilute_series_new(
    kind: DiluteSeriesKind,
    order: usize,
    u: *const c_char,
    out: *mut *mut DiluteSeries,
) -> DiluteStatus {
    guard(|| {
        let u_value = if u.is_null() { None } else { Some(read_rational(u, "u")?) };
        if u_value.is_some() && kind != DiluteSeriesKind::Moment {
            return Err(Failure(DiluteStatus::Config, "u applies only to the moment series".into()));
        }
        let inner = match kind {
            DiluteSeriesKind::Moment => solve_moment_series(&SeriesParams { order, u_value })?,
            DiluteSeriesKind::Catalan => {
                SeriesParams::symbolic(order).validate()?;
                solve_catalan(order)
            }
            DiluteSeriesKind::Phi12 => phi_12(order)?,
            DiluteSeriesKind::Phi22 => phi_22(order)?,
        };
        write_out(out, Box::into_raw(Box::new(DiluteSeries { inner })), "out")
    })
}

/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dilute_series_order(series: *const DiluteSeries, out: *mut usize) -> DiluteStatus {
    guard(|| {
        let h = series.as_ref().ok_or_else(|| null("series"))?;
        write_out(out, h.inner.order(), "out")
    })
}

/// Coefficient of `z^s` as comma-separated `num/den` coefficients of
/// `u^0, u^1, ...`.
///
/// # Safety
/// `series` must be a live handle; `out` must be writable. The string is
/// released with [`dilute_string_free`].
#[no_mangle]
pub unsafe extern "C" fn dilute_series_coefficient(
    series: *const DiluteSeries,
    s: usize,
    out: *mut *mut c_char,
) -> DiluteStatus {
    guard(|| {
        let h = series.as_ref().ok_or_else(|| null("series"))?;
        if s > h.inner.order() {
            return Err(Error::Contract(format!("s={s} exceeds the series order {}", h.inner.order())).into());
        }
        let poly = h.inner.coeff(s);
        let text = if poly.is_zero() {
            "0/1".to_string()
        } else {
            poly.coeffs().iter().map(rational::to_exact_string).collect::<Vec<_>>().join(",")
        };
        write_string(out, text)
    })
}

/// Coefficient of `z^s` at the rational `u`, as `num/den`.
///
/// # Safety
/// `series` must be a live handle, `u` a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dilute_series_evaluate(
    series: *const DiluteSeries,
    s: usize,
    u: *const c_char,
    out: *mut *mut c_char,
) -> DiluteStatus {
    guard(|| {
        let h = series.as_ref().ok_or_else(|| null("series"))?;
        let u = read_rational(u, "u")?;
        if s > h.inner.order() {
            return Err(Error::Contract(format!("s={s} exceeds the series order {}", h.inner.order())).into());
        }
        let v = dilute_core::series::evaluate_coefficient(h.inner.coeff(s), &u)?;
        write_string(out, rational::to_exact_string(&v))
    })
}

/// # Safety
/// `series` must come from [`dilute_series_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn dilute_series_free(series: *mut DiluteSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// `n`, `rho` and `count` moments `V_2, V_4, ...`, each a rational string.
///
/// # Safety
/// `rho` must be a valid C string, `moments` an array of `count` valid C
/// strings (or null when `count` is 0), `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dilute_moment_params_new(
    n: u64,
    rho: *const c_char,
    moments: *const *const c_char,
    count: usize,
    out: *mut *mut DiluteMomentParams,
) -> DiluteStatus {
    guard(|| {
        let rho = read_rational(rho, "rho")?;
        let mut values = Vec::with_capacity(count);
        if count > 0 {
            if moments.is_null() {
                return Err(null("moments"));
            }
            for i in 0..count {
                values.push(read_rational(*moments.add(i), "moment")?);
            }
        }
        let inner = MomentParams::new(n, rho, values)?;
        write_out(out, Box::into_raw(Box::new(DiluteMomentParams { inner })), "out")
    })
}

/// Exact `E Tr H^{2s}` as `num/den`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dilute_exact_moment(
    params: *const DiluteMomentParams,
    s: usize,
    out: *mut *mut c_char,
) -> DiluteStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        write_string(out, rational::to_exact_string(&exact_moment(&p.inner, s)?))
    })
}

/// # Safety
/// `params` must come from [`dilute_moment_params_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn dilute_moment_params_free(params: *mut DiluteMomentParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Monte Carlo estimates of `E Tr H^{2s}` for `s = 1..=s_max`, written to
/// `means[s-1]` and `stderrs[s-1]`. `dist` is `rademacher`, `uniform` or
/// `two-point`; `q` is required for `two-point` and null otherwise.
///
/// # Safety
/// String arguments must be valid C strings (or null where allowed);
/// `means` and `stderrs` must each hold `s_max` doubles.
#[no_mangle]
pub unsafe extern "C" fn dilute_mc_moments(
    n: usize,
    rho: *const c_char,
    dist: *const c_char,
    q: *const c_char,
    samples: usize,
    seed: u64,
    s_max: usize,
    means: *mut f64,
    stderrs: *mut f64,
) -> DiluteStatus {
    guard(|| {
        let rho = read_rational(rho, "rho")?;
        let q = if q.is_null() { None } else { Some(read_rational(q, "q")?) };
        let dist = EntryDist::parse(read_str(dist, "dist")?, q.as_ref())?;
        if means.is_null() || stderrs.is_null() {
            return Err(null("output array"));
        }
        if s_max < 1 {
            return Err(Error::Contract("s_max must be at least 1".into()).into());
        }
        let config = EnsembleConfig { n, rho, dist, master_seed: seed, samples };
        config.validate()?;
        for (i, e) in estimate_moments(&config, s_max)?.iter().enumerate() {
            means.add(i).write(e.mean);
            stderrs.add(i).write(e.stderr);
        }
        Ok(())
    })
}

/// Runs the quick identity suite. Returns `Inconsistency` naming the first
/// failing identity.
#[no_mangle]
pub extern "C" fn dilute_selfcheck_quick() -> DiluteStatus {
    guard(|| {
        let report = run_selfcheck(Depth::Quick, None);
        match report.first_hard_failure() {
            Some(r) => Err(Failure(DiluteStatus::Inconsistency, format!("{}: {}", r.name, r.detail))),
            None => Ok(()),
        }
    })
}
