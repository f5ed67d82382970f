use std::ffi::{CStr, CString};
use std::ptr;

use splitpoint::risk::{risk, Measure, RiskQuery};
use splitpoint::supervised::EstimatorKind;
use splitpoint_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sp_last_error_message()) }.to_str().unwrap().to_owned()
}

#[test]
fn risk_matches_library() {
    let mut v = f64::NAN;
    let s = unsafe { sp_risk(c("B").as_ptr(), 10, 0.3, c("mae").as_ptr(), &mut v) };
    assert_eq!(s, SpStatus::Ok);
    let q = RiskQuery { kind: EstimatorKind::B, n: 10, p: 0.3, measure: Measure::Mae };
    assert_eq!(v, risk(&q).unwrap().value().unwrap());
    assert!(last_error().is_empty());
}

#[test]
fn status_codes() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(sp_risk(c("B").as_ptr(), 10, 1.5, c("mae").as_ptr(), &mut v), SpStatus::Usage);
        assert!(!last_error().is_empty());
        assert_eq!(sp_risk(c("nope").as_ptr(), 10, 0.5, c("mae").as_ptr(), &mut v), SpStatus::Usage);
        assert_eq!(sp_risk(ptr::null(), 10, 0.5, c("mae").as_ptr(), &mut v), SpStatus::InvalidArgument);
        assert_eq!(sp_risk(c("B").as_ptr(), 10, 0.5, c("mae").as_ptr(), ptr::null_mut()), SpStatus::InvalidArgument);
        assert_eq!(sp_risk(c("B").as_ptr(), 10, 0.5, c("mae").as_ptr(), &mut v), SpStatus::Ok);
        assert!(last_error().is_empty());
    }
}

#[test]
fn estimate_midpoint() {
    let mut v = 0.0;
    let s = unsafe { sp_estimate(c("B").as_ptr(), 0.2, 0.6, 3, 5, &mut v) };
    assert_eq!(s, SpStatus::Ok);
    assert!((v - 0.4).abs() < 1e-15);
    let s = unsafe { sp_estimate(c("B").as_ptr(), 0.7, 0.6, 3, 5, &mut v) };
    assert_eq!(s, SpStatus::Data);
}

#[test]
fn distribution_handle() {
    unsafe {
        let d = sp_distribution_new(c("normal").as_ptr());
        assert!(!d.is_null());
        let mut q = 0.0;
        assert_eq!(sp_distribution_quantile(d, 0.975, &mut q), SpStatus::Ok);
        assert!((q - 1.959_963_984_540_054).abs() < 1e-9);
        let mut p = 0.0;
        assert_eq!(sp_distribution_cdf(d, 0.0, &mut p), SpStatus::Ok);
        assert!((p - 0.5).abs() < 1e-15);
        let mut f = 0.0;
        assert_eq!(sp_distribution_pdf(d, 0.0, &mut f), SpStatus::Ok);
        assert!((f - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert_eq!(sp_distribution_quantile(d, 1.5, &mut q), SpStatus::Usage);
        sp_distribution_free(d);
        sp_distribution_free(ptr::null_mut());

        assert!(sp_distribution_new(c("beta(2)").as_ptr()).is_null());
        assert!(!last_error().is_empty());
        assert_eq!(sp_distribution_cdf(ptr::null(), 0.0, &mut p), SpStatus::InvalidArgument);
    }
}

#[test]
fn simulate_returns_owned_csv() {
    let cfg = c("p = [0.3]\nn = [10]\nreps = 200\nseed = 5\n");
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(sp_simulate_config(cfg.as_ptr(), &mut a), SpStatus::Ok);
        assert_eq!(sp_simulate_config(cfg.as_ptr(), &mut b), SpStatus::Ok);
        let (sa, sb) = (CStr::from_ptr(a).to_str().unwrap(), CStr::from_ptr(b).to_str().unwrap());
        assert!(sa.lines().count() > 1);
        assert_eq!(sa, sb);
        sp_string_free(a);
        sp_string_free(b);

        let mut o = ptr::null_mut();
        assert_eq!(sp_simulate_config(c("bogus = 1").as_ptr(), &mut o), SpStatus::Usage);
        assert!(o.is_null());
    }
}

#[test]
fn witness_and_version() {
    let mut v = f64::NAN;
    assert_eq!(unsafe { sp_completeness_witness(0.2, 0.7, &mut v) }, SpStatus::Ok);
    assert!(v.is_finite());
    let ver = unsafe { CStr::from_ptr(sp_version()) }.to_str().unwrap();
    assert_eq!(ver, env!("CARGO_PKG_VERSION"));
}
