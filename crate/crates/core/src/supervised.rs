//! Supervised samples, the sufficient statistic (L, R, K, n) and the point
//! estimators of the cutoff quantile.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionModel;
use crate::error::{Error, Result};

/// Units in which the predictor values are expressed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    /// Standard uniform scale, bounds 0 and 1.
    Quantile,
    /// Raw X scale of the attached distribution; bounds are its support.
    Raw(DistributionModel),
}

impl Scale {
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Scale::Quantile => (0.0, 1.0),
            Scale::Raw(d) => d.support(),
        }
    }
}

/// Predictor values with labels; `y[i]` is true for class 1 (left of the cut).
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedSample {
    pub x: Vec<f64>,
    pub y: Vec<bool>,
    pub scale: Scale,
}

impl SupervisedSample {
    /// Maps every value through the attached CDF; a quantile-scale sample is
    /// returned unchanged.
    pub fn to_quantile_scale(&self) -> Result<SupervisedSample> {
        let x = match self.scale {
            Scale::Quantile => self.x.clone(),
            Scale::Raw(d) => self.x.iter().map(|&v| d.cdf(v)).collect::<Result<_>>()?,
        };
        Ok(SupervisedSample { x, y: self.y.clone(), scale: Scale::Quantile })
    }
}

/// Largest class-1 value `l`, smallest class-0 value `r`, class-1 count `k`
/// and sample size `n`. Missing sides take the scale bounds `lo` / `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficientStat {
    pub l: f64,
    pub r: f64,
    pub k: usize,
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
}

impl SufficientStat {
    /// A quantile-scale statistic.
    pub fn quantile(l: f64, r: f64, k: usize, n: usize) -> Result<Self> {
        let s = SufficientStat { l, r, k, n, lo: 0.0, hi: 1.0 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        if self.k > self.n {
            return Err(Error::Domain(format!("K={} exceeds n={}", self.k, self.n)));
        }
        if self.l.is_nan() || self.r.is_nan() || !(self.lo <= self.l && self.l < self.r && self.r <= self.hi) {
            return Err(Error::ModelViolation(format!(
                "need lo <= L < R <= hi, got lo={}, L={}, R={}, hi={}",
                self.lo, self.l, self.r, self.hi
            )));
        }
        if (self.k == 0 && self.l != self.lo) || (self.k == self.n && self.r != self.hi) {
            return Err(Error::ModelViolation(format!(
                "K={} of n={} is inconsistent with L={}, R={}",
                self.k, self.n, self.l, self.r
            )));
        }
        Ok(())
    }

    pub fn all_right(&self) -> bool {
        self.k == 0
    }

    pub fn all_left(&self) -> bool {
        self.k == self.n
    }

    /// The same statistic on the quantile scale, mapping observed ends
    /// through `cdf` and missing ends to 0 / 1.
    pub fn transformed(&self, cdf: &dyn Fn(f64) -> f64) -> SufficientStat {
        SufficientStat {
            l: if self.all_right() { 0.0 } else { cdf(self.l) },
            r: if self.all_left() { 1.0 } else { cdf(self.r) },
            lo: 0.0,
            hi: 1.0,
            ..*self
        }
    }
}

/// The point estimators of the cutoff quantile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EstimatorKind {
    Y,
    L,
    R,
    B,
    RB,
    SL,
    SR,
    SB,
    /// Midpoint in raw X units mapped through the CDF.
    XScale,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 9] = [
        EstimatorKind::Y,
        EstimatorKind::L,
        EstimatorKind::R,
        EstimatorKind::B,
        EstimatorKind::RB,
        EstimatorKind::SL,
        EstimatorKind::SR,
        EstimatorKind::SB,
        EstimatorKind::XScale,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Y => "Y",
            EstimatorKind::L => "L",
            EstimatorKind::R => "R",
            EstimatorKind::B => "B",
            EstimatorKind::RB => "RB",
            EstimatorKind::SL => "SL",
            EstimatorKind::SR => "SR",
            EstimatorKind::SB => "SB",
            EstimatorKind::XScale => "X_SCALE",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.name() == up || (up == "X" && *k == EstimatorKind::XScale))
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown estimator `{s}`; expected one of Y, L, R, B, RB, SL, SR, SB, X_SCALE"
                ))
            })
    }
}

impl TryFrom<String> for EstimatorKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EstimatorKind> for String {
    fn from(k: EstimatorKind) -> String {
        k.name().to_string()
    }
}

/// Draws `n` values from `dist` and labels `y = F(x) < p`.
pub fn generate_sample<R: Rng + ?Sized>(
    dist: &DistributionModel,
    p: f64,
    n: usize,
    rng: &mut R,
) -> Result<SupervisedSample> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1), got {p}")));
    }
    if n == 0 {
        return Err(Error::Domain("sample size must be at least 1".into()));
    }
    let x = dist.sample(rng, n)?;
    let y = x.iter().map(|&v| dist.cdf_unchecked(v) < p).collect();
    Ok(SupervisedSample { x, y, scale: Scale::Raw(*dist) })
}

pub fn sufficient_stat(sample: &SupervisedSample) -> Result<SufficientStat> {
    let n = sample.x.len();
    if n == 0 {
        return Err(Error::EmptyInput("supervised sample is empty".into()));
    }
    if sample.y.len() != n {
        return Err(Error::Domain(format!("{} values but {} labels", n, sample.y.len())));
    }
    let (lo, hi) = sample.scale.bounds();
    let mut l = f64::NEG_INFINITY;
    let mut r = f64::INFINITY;
    let mut k = 0;
    for (&x, &left) in sample.x.iter().zip(&sample.y) {
        if x.is_nan() {
            return Err(Error::Domain("sample contains NaN".into()));
        }
        if left {
            k += 1;
            l = l.max(x);
        } else {
            r = r.min(x);
        }
    }
    if k == 0 {
        l = lo;
    }
    if k == n {
        r = hi;
    }
    let stat = SufficientStat { l, r, k, n, lo, hi };
    if k > 0 && k < n && l >= r {
        return Err(Error::ModelViolation(format!(
            "labels are not separable by one threshold: class-1 max {l} >= class-0 min {r}"
        )));
    }
    stat.validate()?;
    Ok(stat)
}

/// Evaluates an estimator. With `cdf` supplied, a raw-scale statistic is
/// first mapped to the quantile scale (X_SCALE instead maps the raw
/// midpoint). Without it, estimators are computed in the statistic's own
/// units; Y is always the proportion K/n.
pub fn estimate(kind: EstimatorKind, stat: &SufficientStat, cdf: Option<&dyn Fn(f64) -> f64>) -> Result<f64> {
    stat.validate()?;
    if kind == EstimatorKind::XScale {
        let f = cdf.ok_or_else(|| Error::Usage("X_SCALE needs the CDF of the predictor".into()))?;
        return Ok(f(0.5 * (stat.l + stat.r)));
    }
    let s = match cdf {
        Some(f) => stat.transformed(f),
        None => *stat,
    };
    Ok(estimate_unchecked(kind, &s))
}

/// Estimator on a statistic that is known to be valid; X_SCALE is treated
/// as B because no CDF is available here.
pub(crate) fn estimate_unchecked(kind: EstimatorKind, s: &SufficientStat) -> f64 {
    let mid = 0.5 * (s.l + s.r);
    match kind {
        EstimatorKind::Y => s.k as f64 / s.n as f64,
        EstimatorKind::L => s.l,
        EstimatorKind::R => s.r,
        EstimatorKind::B | EstimatorKind::XScale => mid,
        EstimatorKind::RB => {
            if s.all_left() {
                s.hi
            } else if s.all_right() {
                s.lo
            } else {
                let n = s.n as f64;
                let left = s.l - s.lo;
                let frac = left / (left + (s.hi - s.r));
                s.lo + (s.hi - s.lo) * (1.0 / n + (n - 2.0) / n * frac)
            }
        }
        EstimatorKind::SL => {
            if s.all_left() {
                s.hi
            } else {
                s.l
            }
        }
        EstimatorKind::SR => {
            if s.all_right() {
                s.lo
            } else {
                s.r
            }
        }
        EstimatorKind::SB => {
            if s.all_left() {
                s.hi
            } else if s.all_right() {
                s.lo
            } else {
                mid
            }
        }
    }
}
