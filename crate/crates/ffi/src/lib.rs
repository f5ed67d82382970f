//! C ABI for the `splitpoint` library.
//!
//! Every fallible function returns an [`SpStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`sp_last_error_message`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use splitpoint::distributions::DistributionModel;
use splitpoint::error::Error;
use splitpoint::montecarlo::{simulate_risk, ExperimentConfig};
use splitpoint::risk::{self, Measure, RiskQuery, RiskValue};
use splitpoint::supervised::{estimate, EstimatorKind, SufficientStat};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    InvalidArgument = 1,
    /// Bad parameter, domain or configuration.
    Usage = 2,
    /// Unusable input data or an I/O failure.
    Data = 3,
    /// A numerical routine failed.
    Numeric = 4,
    /// The quantity has no closed form; the output is set to NaN.
    NotAnalytic = 5,
    /// An internal panic was caught.
    Internal = 6,
}

/// Opaque handle to a probability distribution.
pub struct SpDistribution {
    model: DistributionModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> SpStatus {
    match e.exit_code() {
        2 => SpStatus::Usage,
        3 => SpStatus::Data,
        _ => SpStatus::Numeric,
    }
}

/// Runs `f`, recording errors and turning panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<SpStatus, (SpStatus, String)>) -> SpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            set_error("");
            s
        }
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal error");
            SpStatus::Internal
        }
    }
}

fn lib<T>(r: splitpoint::error::Result<T>) -> Result<T, (SpStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, (SpStatus, String)> {
    if s.is_null() {
        return Err((SpStatus::InvalidArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (SpStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn out_ptr<T>(out: *mut T) -> Result<*mut T, (SpStatus, String)> {
    if out.is_null() {
        Err((SpStatus::InvalidArgument, "output pointer is null".into()))
    } else {
        Ok(out)
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, (SpStatus, String)> {
    lib(s.parse())
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn sp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Closed-form risk of estimator `kind` (e.g. `"B"`) for sample size `n` at
/// split `p`. `measure` is one of `mean`, `bias`, `variance`, `mse`, `rmse`,
/// `mae`, `rmse_approx`.
///
/// # Safety
/// `kind` and `measure` must be valid NUL-terminated strings and `out` a
/// valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn sp_risk(kind: *const c_char, n: u32, p: f64, measure: *const c_char, out: *mut f64) -> SpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let kind: EstimatorKind = parse(text(kind, "kind")?)?;
        let measure: Measure = parse(text(measure, "measure")?)?;
        match lib(risk::risk(&RiskQuery { kind, n: n as usize, p, measure }))? {
            RiskValue::Value(v) => {
                *out = v;
                Ok(SpStatus::Ok)
            }
            RiskValue::NotAnalytic => {
                *out = f64::NAN;
                Ok(SpStatus::NotAnalytic)
            }
        }
    })
}

/// Large-`n` RMSE approximation.
///
/// # Safety
/// `kind` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_rmse_approx(kind: *const c_char, n: u32, p: f64, out: *mut f64) -> SpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let kind: EstimatorKind = parse(text(kind, "kind")?)?;
        *out = lib(risk::rmse_approx(kind, n as usize, p))?;
        Ok(SpStatus::Ok)
    })
}

/// Estimate on the quantile scale from the sufficient statistic: `l` is the
/// largest class-1 value (0 if none), `r` the smallest class-0 value (1 if
/// none), `k` the class-1 count out of `n`.
///
/// # Safety
/// `kind` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_estimate(kind: *const c_char, l: f64, r: f64, k: u32, n: u32, out: *mut f64) -> SpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let kind: EstimatorKind = parse(text(kind, "kind")?)?;
        let stat = lib(SufficientStat::quantile(l, r, k as usize, n as usize))?;
        *out = lib(estimate(kind, &stat, None))?;
        Ok(SpStatus::Ok)
    })
}

/// The function of `(L, R)` with zero mean for every `p` when `n = 2`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_completeness_witness(l: f64, r: f64, out: *mut f64) -> SpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = lib(risk::completeness_witness(l, r))?;
        Ok(SpStatus::Ok)
    })
}

/// Parses a distribution such as `"beta(2,10)"` or `"normal"`. Returns null
/// on failure. Release with [`sp_distribution_free`].
///
/// # Safety
/// `spec` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sp_distribution_new(spec: *const c_char) -> *mut SpDistribution {
    let mut handle = ptr::null_mut();
    guard(|| {
        let model: DistributionModel = parse(text(spec, "spec")?)?;
        lib(model.validate())?;
        handle = Box::into_raw(Box::new(SpDistribution { model }));
        Ok(SpStatus::Ok)
    });
    handle
}

/// # Safety
/// `dist` must be null or a handle from [`sp_distribution_new`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn sp_distribution_free(dist: *mut SpDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

unsafe fn with_dist(
    dist: *const SpDistribution,
    out: *mut f64,
    f: impl FnOnce(&DistributionModel) -> splitpoint::error::Result<f64>,
) -> SpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let d = dist.as_ref().ok_or((SpStatus::InvalidArgument, "distribution handle is null".to_string()))?;
        *out = lib(f(&d.model))?;
        Ok(SpStatus::Ok)
    })
}

/// # Safety
/// `dist` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_distribution_cdf(dist: *const SpDistribution, x: f64, out: *mut f64) -> SpStatus {
    with_dist(dist, out, |d| d.cdf(x))
}

/// # Safety
/// `dist` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_distribution_pdf(dist: *const SpDistribution, x: f64, out: *mut f64) -> SpStatus {
    with_dist(dist, out, |d| d.pdf(x))
}

/// # Safety
/// `dist` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_distribution_quantile(dist: *const SpDistribution, u: f64, out: *mut f64) -> SpStatus {
    with_dist(dist, out, |d| d.quantile(u))
}

/// Runs a risk-curve simulation from TOML text and returns its CSV in
/// `*out_csv`. Release the string with [`sp_string_free`].
///
/// # Safety
/// `config_toml` must be a valid NUL-terminated string and `out_csv` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_simulate_config(config_toml: *const c_char, out_csv: *mut *mut c_char) -> SpStatus {
    guard(|| {
        let out = out_ptr(out_csv)?;
        *out = ptr::null_mut();
        let cfg = lib(ExperimentConfig::from_toml(text(config_toml, "config")?))?;
        let csv = lib(lib(simulate_risk(&cfg))?.to_csv_string())?;
        *out = CString::new(csv).map_err(|e| (SpStatus::Internal, e.to_string()))?.into_raw();
        Ok(SpStatus::Ok)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn sp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
