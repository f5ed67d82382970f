//! Closed-form moments and risks of the estimators under the standard
//! uniform model, plus large-n RMSE approximations and the n = 2 unbiased
//! estimator of zero.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::supervised::EstimatorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Measure {
    Mean,
    Bias,
    Variance,
    Mse,
    Rmse,
    Mae,
    RmseApprox,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::Mean,
        Measure::Bias,
        Measure::Variance,
        Measure::Mse,
        Measure::Rmse,
        Measure::Mae,
        Measure::RmseApprox,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Mean => "mean",
            Measure::Bias => "bias",
            Measure::Variance => "variance",
            Measure::Mse => "mse",
            Measure::Rmse => "rmse",
            Measure::Mae => "mae",
            Measure::RmseApprox => "rmse_approx",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let low = s.trim().to_ascii_lowercase().replace('-', "_");
        Measure::ALL.into_iter().find(|m| m.name() == low).ok_or_else(|| {
            Error::Usage(format!(
                "unknown measure `{s}`; expected one of mean, bias, variance, mse, rmse, mae, rmse_approx"
            ))
        })
    }
}

impl TryFrom<String> for Measure {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Measure> for String {
    fn from(m: Measure) -> String {
        m.name().to_string()
    }
}

/// Result of a risk query. `NotAnalytic` marks cells with no closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiskValue {
    Value(f64),
    NotAnalytic,
}

impl RiskValue {
    pub fn value(self) -> Option<f64> {
        match self {
            RiskValue::Value(v) => Some(v),
            RiskValue::NotAnalytic => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskQuery {
    pub kind: EstimatorKind,
    pub n: usize,
    pub p: f64,
    pub measure: Measure,
}

fn check(n: usize, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1), got {p}")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(())
}

/// `p^m` and `(1-p)^m` evaluated through logarithms so that large powers
/// underflow cleanly.
#[derive(Clone, Copy)]
struct Powers {
    p: f64,
    q: f64,
    ln_p: f64,
    ln_q: f64,
}

impl Powers {
    fn new(p: f64) -> Self {
        Powers { p, q: 1.0 - p, ln_p: p.ln(), ln_q: (-p).ln_1p() }
    }

    fn swap(self) -> Self {
        Powers { p: self.q, q: self.p, ln_p: self.ln_q, ln_q: self.ln_p }
    }

    fn p_pow(&self, m: f64) -> f64 {
        (m * self.ln_p).exp()
    }

    fn q_pow(&self, m: f64) -> f64 {
        (m * self.ln_q).exp()
    }

    /// `1 - q^m`
    fn one_minus_q_pow(&self, m: f64) -> f64 {
        -(m * self.ln_q).exp_m1()
    }
}

/// Mean, MSE and (where it exists) MAE of one estimator.
struct Moments {
    mean: f64,
    mse: f64,
    mae: Option<f64>,
}

fn moments_l(w: Powers, n: f64) -> Moments {
    let p = w.p;
    let a = w.one_minus_q_pow(n + 1.0) / (n + 1.0);
    let q1 = w.q_pow(n + 1.0);
    Moments {
        mean: p - a,
        mse: 2.0 * (1.0 - (p * (n + 1.0) + 1.0) * q1) / ((n + 1.0) * (n + 2.0)),
        mae: Some(a),
    }
}

impl Moments {
    fn mirrored(self) -> Self {
        Moments { mean: 1.0 - self.mean, ..self }
    }
}

fn var_l(w: Powers, n: f64) -> f64 {
    let (p, q) = (w.p, w.q);
    let q1 = w.q_pow(n + 1.0);
    (n / (n + 2.0) - 2.0 * (n * p - q / (n + 2.0)) * q1 - q1 * q1) / ((n + 1.0) * (n + 1.0))
}

fn moments_b(w: Powers, n: f64) -> Moments {
    let (p, q) = (w.p, w.q);
    let (pn1, qn1) = (w.p_pow(n + 1.0), w.q_pow(n + 1.0));
    let mse = (1.0 - (n + 2.0) * p * q * (w.p_pow(n) + w.q_pow(n))) / (2.0 * (n + 1.0) * (n + 2.0));
    let mae = (1.0 - (pn1 + qn1) + (p - q).abs().powf(n + 1.0)) / (2.0 * (n + 1.0));
    Moments { mean: p + (qn1 - pn1) / (2.0 * (n + 1.0)), mse, mae: Some(mae) }
}

fn moments_sl(w: Powers, n: f64) -> Moments {
    let (p, q) = (w.p, w.q);
    let (pn, qn) = (w.p_pow(n), w.q_pow(n));
    let mean = p - w.one_minus_q_pow(n + 1.0) / (n + 1.0) + pn * (1.0 - n * p / (n + 1.0));
    let num = ((n + 3.0) * n * q * q - 4.0 * p + 2.0) * pn + 2.0 * p * (p - n * q) * qn - 2.0 * qn + 2.0;
    Moments { mean, mse: num / ((n + 1.0) * (n + 2.0)), mae: None }
}

fn moments_sb(w: Powers, n: f64) -> Moments {
    let (p, q) = (w.p, w.q);
    let (pn, qn) = (w.p_pow(n), w.q_pow(n));
    let mean = p + 0.5 * (pn * q - p * qn);
    let num = pn * (3.0 * n * n * q * q + 9.0 * n * q * q + 4.0 * (p - 3.0) * p + 6.0)
        + p * ((3.0 * n * (n + 3.0) + 4.0) * p + 4.0) * qn
        - 2.0 * qn
        + 2.0;
    Moments { mean, mse: num / (4.0 * (n + 1.0) * (n + 2.0)), mae: None }
}

/// Variance of the Rao-Blackwell estimator from the formula valid for
/// every `n != 3`, with `n` treated as a real number.
pub fn rb_variance_real_n(n: f64, p: f64) -> f64 {
    let w = Powers::new(p);
    let pq = p * w.q;
    ((n - 1.0) / n * (1.0 - (w.p_pow(n) + w.q_pow(n))) - 2.0 * pq) / ((n - 3.0) * n)
}

fn rb_variance(n: usize, p: f64) -> f64 {
    let q = 1.0 - p;
    match n {
        1 => p * q,
        2 => p * q / 2.0,
        3 => (p * q - 2.0 * (p.powi(3) * p.ln() + q.powi(3) * (-p).ln_1p())) / 9.0,
        _ => rb_variance_real_n(n as f64, p),
    }
}

/// `E|K/n - p|` for `K ~ Binomial(n, p)` by direct summation of the pmf.
fn mae_y(n: usize, p: f64) -> f64 {
    let w = Powers::new(p);
    let nf = n as f64;
    let mut ln_choose = 0.0;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            ln_choose += ((nf - k as f64 + 1.0) / k as f64).ln();
        }
        let kf = k as f64;
        let pmf = (ln_choose + kf * w.ln_p + (nf - kf) * w.ln_q).exp();
        total += pmf * (kf / nf - p).abs();
    }
    total
}

/// Closed-form risk. MAE of RB, SL, SR and SB has no closed form and
/// yields `NotAnalytic`; X_SCALE is not a quantile-scale estimator and is
/// rejected.
pub fn risk(query: &RiskQuery) -> Result<RiskValue> {
    let RiskQuery { kind, n, p, measure } = *query;
    check(n, p)?;
    if measure == Measure::RmseApprox {
        return rmse_approx(kind, n, p).map(RiskValue::Value);
    }
    let nf = n as f64;
    let w = Powers::new(p);
    let pq = p * w.q;
    // (mean, variance, mse, mae)
    let (mean, var, mse, mae) = match kind {
        EstimatorKind::Y => (p, pq / nf, pq / nf, Some(mae_y(n, p))),
        EstimatorKind::RB => {
            let v = rb_variance(n, p);
            (p, v, v, None)
        }
        EstimatorKind::L | EstimatorKind::R => {
            let (m, v) = if kind == EstimatorKind::L {
                (moments_l(w, nf), var_l(w, nf))
            } else {
                (moments_l(w.swap(), nf).mirrored(), var_l(w.swap(), nf))
            };
            (m.mean, v, m.mse, m.mae)
        }
        EstimatorKind::B => {
            let m = moments_b(w, nf);
            let bias = m.mean - p;
            (m.mean, m.mse - bias * bias, m.mse, m.mae)
        }
        EstimatorKind::SL | EstimatorKind::SR | EstimatorKind::SB => {
            let m = match kind {
                EstimatorKind::SL => moments_sl(w, nf),
                EstimatorKind::SR => moments_sl(w.swap(), nf).mirrored(),
                _ => moments_sb(w, nf),
            };
            let bias = m.mean - p;
            (m.mean, m.mse - bias * bias, m.mse, m.mae)
        }
        EstimatorKind::XScale => {
            return Err(Error::Domain("X_SCALE has no closed-form risk; use the simulator".into()))
        }
    };
    let v = match measure {
        Measure::Mean => mean,
        Measure::Bias => mean - p,
        Measure::Variance => var,
        Measure::Mse => mse,
        Measure::Rmse => mse.sqrt(),
        Measure::Mae => match mae {
            Some(v) => v,
            None => return Ok(RiskValue::NotAnalytic),
        },
        Measure::RmseApprox => unreachable!("handled above"),
    };
    Ok(RiskValue::Value(v))
}

/// Leading-order RMSE for large `n`.
pub fn rmse_approx(kind: EstimatorKind, n: usize, p: f64) -> Result<f64> {
    check(n, p)?;
    let nf = n as f64;
    match kind {
        EstimatorKind::RB => Ok((1.0 - 2.0 * p * (1.0 - p)).sqrt() / nf),
        EstimatorKind::L | EstimatorKind::R => Ok(2f64.sqrt() / nf),
        EstimatorKind::B => Ok(1.0 / (2f64.sqrt() * nf)),
        other => Err(Error::Domain(format!("no RMSE approximation for estimator {other}"))),
    }
}

/// A non-constant function of (L, R) whose expectation is zero for every p
/// when n = 2.
pub fn completeness_witness(l: f64, r: f64) -> Result<f64> {
    if !(0.0 <= l && l < r && r <= 1.0) {
        return Err(Error::Domain(format!("need 0 <= L < R <= 1, got L={l}, R={r}")));
    }
    match (l == 0.0, r == 1.0) {
        (true, true) => Err(Error::Domain("L = 0 and R = 1 cannot occur together".into())),
        (false, true) => Ok(2.0 - 1.0 / l),
        (true, false) => Ok(2.0 - 1.0 / (1.0 - r)),
        (false, false) => Ok(2.0),
    }
}
