//! Continuous distributions used by the experiments, plus the two estimated
//! CDFs (empirical and fitted normal) that drive the transformation pipeline.
//!
//! Every family exposes `cdf`, `quantile`, `pdf` and `sample`. Sampling is
//! always inverse-transform (`quantile` applied to open-interval uniform
//! draws) so that all families share one random path given a seed.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::{beta, erf, gamma};

use crate::error::{Error, Result};

/// Width at which bracketed inversions stop, relative to `max(1, |x|)`.
const INVERSION_WIDTH: f64 = 1e-12;
const MAX_INVERSION_STEPS: usize = 2200;

/// A parametric family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DistributionModel {
    Uniform { a: f64, b: f64 },
    Beta { alpha: f64, beta: f64 },
    Normal { mu: f64, sigma: f64 },
    Cauchy { loc: f64, scale: f64 },
    Laplace { loc: f64, scale: f64 },
    ChiSquared { df: f64 },
    Exponential { rate: f64 },
    LogNormal { mu: f64, sigma: f64 },
    /// `weight` is the probability of the first component.
    NormalMixture {
        weight: f64,
        mu1: f64,
        sigma1: f64,
        mu2: f64,
        sigma2: f64,
    },
    /// Two back-to-back triangles on [0, 1] whose density vanishes at `p`.
    BiTriangle { p: f64 },
}

impl DistributionModel {
    pub const STANDARD_UNIFORM: DistributionModel = DistributionModel::Uniform { a: 0.0, b: 1.0 };
    pub const STANDARD_NORMAL: DistributionModel = DistributionModel::Normal { mu: 0.0, sigma: 1.0 };

    pub fn validate(&self) -> Result<()> {
        use DistributionModel::*;
        let bad = |msg: String| Err(Error::ParameterDomain(msg));
        let finite = |v: f64| v.is_finite();
        match *self {
            Uniform { a, b } if !(finite(a) && finite(b) && a < b) => {
                bad(format!("uniform requires finite a < b, got a={a}, b={b}"))
            }
            Beta { alpha, beta } if !(alpha > 0.0 && beta > 0.0 && finite(alpha) && finite(beta)) => {
                bad(format!("beta requires alpha, beta > 0, got ({alpha}, {beta})"))
            }
            Normal { mu, sigma } | LogNormal { mu, sigma } if !(finite(mu) && sigma > 0.0 && finite(sigma)) => {
                bad(format!("{} requires finite mu and sigma > 0, got ({mu}, {sigma})", self.family()))
            }
            Cauchy { loc, scale } | Laplace { loc, scale } if !(finite(loc) && scale > 0.0 && finite(scale)) => {
                bad(format!("{} requires finite loc and scale > 0, got ({loc}, {scale})", self.family()))
            }
            ChiSquared { df } if !(df > 0.0 && finite(df)) => bad(format!("chi-squared requires df > 0, got {df}")),
            Exponential { rate } if !(rate > 0.0 && finite(rate)) => {
                bad(format!("exponential requires rate > 0, got {rate}"))
            }
            NormalMixture { weight, mu1, sigma1, mu2, sigma2 }
                if !(weight > 0.0
                    && weight < 1.0
                    && finite(mu1)
                    && finite(mu2)
                    && sigma1 > 0.0
                    && sigma2 > 0.0
                    && finite(sigma1)
                    && finite(sigma2)) =>
            {
                bad(format!(
                    "normal mixture requires 0 < w < 1 and positive sigmas, got ({weight}, {mu1}, {sigma1}, {mu2}, {sigma2})"
                ))
            }
            BiTriangle { p } if !(p > 0.0 && p < 1.0) => bad(format!("bi-triangle requires 0 < p < 1, got {p}")),
            _ => Ok(()),
        }
    }

    pub fn family(&self) -> &'static str {
        use DistributionModel::*;
        match self {
            Uniform { .. } => "uniform",
            Beta { .. } => "beta",
            Normal { .. } => "normal",
            Cauchy { .. } => "cauchy",
            Laplace { .. } => "laplace",
            ChiSquared { .. } => "chisq",
            Exponential { .. } => "exponential",
            LogNormal { .. } => "lognormal",
            NormalMixture { .. } => "mixture",
            BiTriangle { .. } => "bitriangle",
        }
    }

    /// Closure of the support, possibly infinite at either end.
    pub fn support(&self) -> (f64, f64) {
        use DistributionModel::*;
        match *self {
            Uniform { a, b } => (a, b),
            Beta { .. } | BiTriangle { .. } => (0.0, 1.0),
            ChiSquared { .. } | Exponential { .. } | LogNormal { .. } => (0.0, f64::INFINITY),
            Normal { .. } | Cauchy { .. } | Laplace { .. } | NormalMixture { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if x.is_nan() {
            return Err(Error::Domain("cdf evaluated at NaN".into()));
        }
        Ok(self.cdf_unchecked(x))
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if x.is_nan() {
            return Err(Error::Domain("pdf evaluated at NaN".into()));
        }
        Ok(self.pdf_unchecked(x))
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        self.validate()?;
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile requires 0 < u < 1, got {u}")));
        }
        self.quantile_unchecked(u)
    }

    /// `n` draws by inverse transform of open-interval uniforms.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<f64>> {
        self.validate()?;
        (0..n)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                self.quantile_unchecked(u)
            })
            .collect()
    }

    /// CDF for an already validated model.
    pub(crate) fn cdf_unchecked(&self, x: f64) -> f64 {
        use DistributionModel::*;
        match *self {
            Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Beta { alpha, beta: b } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    beta::beta_reg(alpha, b, x)
                }
            }
            Normal { mu, sigma } => standard_normal_cdf((x - mu) / sigma),
            Cauchy { loc, scale } => 0.5 + ((x - loc) / scale).atan() / PI,
            Laplace { loc, scale } => {
                let z = (x - loc) / scale;
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            ChiSquared { df } => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    gamma::gamma_lr(df / 2.0, x / 2.0)
                }
            }
            Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    standard_normal_cdf((x.ln() - mu) / sigma)
                }
            }
            NormalMixture { weight, mu1, sigma1, mu2, sigma2 } => {
                weight * standard_normal_cdf((x - mu1) / sigma1)
                    + (1.0 - weight) * standard_normal_cdf((x - mu2) / sigma2)
            }
            BiTriangle { p } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else if x <= p {
                    p - (p - x) * (p - x) / p
                } else {
                    p + (x - p) * (x - p) / (1.0 - p)
                }
            }
        }
    }

    pub(crate) fn pdf_unchecked(&self, x: f64) -> f64 {
        use DistributionModel::*;
        match *self {
            Uniform { a, b } => {
                if (a..=b).contains(&x) {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Beta { alpha, beta: b } => {
                if !(0.0..=1.0).contains(&x) {
                    return 0.0;
                }
                let ln = (alpha - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - beta::ln_beta(alpha, b);
                let d = ln.exp();
                if d.is_nan() {
                    0.0
                } else {
                    d
                }
            }
            Normal { mu, sigma } => standard_normal_pdf((x - mu) / sigma) / sigma,
            Cauchy { loc, scale } => {
                let z = (x - loc) / scale;
                1.0 / (PI * scale * (1.0 + z * z))
            }
            Laplace { loc, scale } => (-(x - loc).abs() / scale).exp() / (2.0 * scale),
            ChiSquared { df } => {
                if x < 0.0 || x.is_infinite() {
                    return 0.0;
                }
                let k = df / 2.0;
                if x == 0.0 {
                    return match k.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 0.5,
                        _ => 0.0,
                    };
                }
                ((k - 1.0) * x.ln() - x / 2.0 - k * 2f64.ln() - gamma::ln_gamma(k)).exp()
            }
            Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    standard_normal_pdf((x.ln() - mu) / sigma) / (sigma * x)
                }
            }
            NormalMixture { weight, mu1, sigma1, mu2, sigma2 } => {
                weight * standard_normal_pdf((x - mu1) / sigma1) / sigma1
                    + (1.0 - weight) * standard_normal_pdf((x - mu2) / sigma2) / sigma2
            }
            BiTriangle { p } => {
                if !(0.0..=1.0).contains(&x) {
                    0.0
                } else if x < p {
                    2.0 - 2.0 / p * x
                } else if x > p {
                    2.0 / (1.0 - p) * (x - p)
                } else {
                    0.0
                }
            }
        }
    }

    /// Quantile for a validated model and `u` strictly inside (0, 1).
    pub(crate) fn quantile_unchecked(&self, u: f64) -> Result<f64> {
        use DistributionModel::*;
        let x = match *self {
            Uniform { a, b } => a + u * (b - a),
            Normal { mu, sigma } => mu + sigma * standard_normal_quantile(u),
            LogNormal { mu, sigma } => (mu + sigma * standard_normal_quantile(u)).exp(),
            Cauchy { loc, scale } => loc + scale * (PI * (u - 0.5)).tan(),
            Laplace { loc, scale } => {
                if u < 0.5 {
                    loc + scale * (2.0 * u).ln()
                } else {
                    loc - scale * (2.0 - 2.0 * u).ln()
                }
            }
            Exponential { rate } => -(-u).ln_1p() / rate,
            ChiSquared { df: 1.0 } => {
                // P(Z^2 <= x) = 2 Phi(sqrt x) - 1
                let z = standard_normal_quantile(0.5 + 0.5 * u);
                z * z
            }
            ChiSquared { df } => {
                let mut hi = df.max(1.0);
                while self.cdf_unchecked(hi) < u {
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return Err(Error::Numeric(format!("no upper bracket for chi-squared quantile u={u}")));
                    }
                }
                self.newton_in_bracket(u, 0.0, hi, 0.5 * hi)?
            }
            Beta { alpha, beta: b } => {
                let guess = beta::inv_beta_reg(alpha, b, u);
                let guess = if guess > 0.0 && guess < 1.0 { guess } else { 0.5 };
                self.newton_in_bracket(u, 0.0, 1.0, guess)?
            }
            NormalMixture { mu1, sigma1, mu2, sigma2, .. } => {
                let z = standard_normal_quantile(u);
                let (q1, q2) = (mu1 + sigma1 * z, mu2 + sigma2 * z);
                bisect(|x| self.cdf_unchecked(x), u, q1.min(q2), q1.max(q2))?
            }
            BiTriangle { p } => {
                if u <= p {
                    p - (p * (p - u)).sqrt()
                } else {
                    p + ((u - p) * (1.0 - p)).sqrt()
                }
            }
        };
        if x.is_nan() {
            return Err(Error::Numeric(format!("{self} quantile at u={u} produced NaN")));
        }
        Ok(x)
    }

    /// Safeguarded Newton iteration kept inside a bracket that shrinks like
    /// bisection whenever a Newton step would leave it.
    fn newton_in_bracket(&self, u: f64, mut lo: f64, mut hi: f64, start: f64) -> Result<f64> {
        let mut x = start.clamp(lo, hi);
        for _ in 0..MAX_INVERSION_STEPS {
            let f = self.cdf_unchecked(x) - u;
            if f == 0.0 {
                return Ok(x);
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                return Ok(0.5 * (lo + hi));
            }
            let d = self.pdf_unchecked(x);
            let step = if d > 0.0 && d.is_finite() { f / d } else { f64::NAN };
            let next = x - step;
            if next > lo && next < hi {
                if step.abs() <= 1e-15 * x.abs().max(1e-300) {
                    return Ok(next);
                }
                x = next;
            } else {
                x = 0.5 * (lo + hi);
            }
        }
        Err(Error::Numeric(format!(
            "{self} quantile at u={u} did not converge; last bracket [{lo}, {hi}]"
        )))
    }
}

/// Plain bisection on a nondecreasing function until the bracket is narrower
/// than the inversion width.
fn bisect(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..MAX_INVERSION_STEPS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= INVERSION_WIDTH * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numeric(format!(
        "bisection for target {target} did not converge; last bracket [{lo}, {hi}]"
    )))
}

pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * erf::erfc(-z / SQRT_2)
}

pub fn standard_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Inverse standard normal CDF, polished with one Halley step.
pub fn standard_normal_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    let x = -SQRT_2 * erf::erfc_inv(2.0 * u);
    let d = standard_normal_pdf(x);
    if d <= 0.0 || !x.is_finite() {
        return x;
    }
    let t = (standard_normal_cdf(x) - u) / d;
    x - t / (1.0 + 0.5 * x * t)
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DistributionModel::*;
        let name = self.family();
        match *self {
            Uniform { a, b } => write!(f, "{name}({a},{b})"),
            Beta { alpha, beta } => write!(f, "{name}({alpha},{beta})"),
            Normal { mu, sigma } | LogNormal { mu, sigma } => write!(f, "{name}({mu},{sigma})"),
            Cauchy { loc, scale } | Laplace { loc, scale } => write!(f, "{name}({loc},{scale})"),
            ChiSquared { df } => write!(f, "{name}({df})"),
            Exponential { rate } => write!(f, "{name}({rate})"),
            NormalMixture { weight, mu1, sigma1, mu2, sigma2 } => {
                write!(f, "{name}({weight},{mu1},{sigma1},{mu2},{sigma2})")
            }
            BiTriangle { p } => write!(f, "{name}({p})"),
        }
    }
}

impl FromStr for DistributionModel {
    type Err = Error;

    /// Parses `family(arg, ...)`; a bare family name takes its standard
    /// parameters, e.g. `normal` is `normal(0,1)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(open) => {
                let close = s
                    .rfind(')')
                    .filter(|&c| c > open && c == s.len() - 1)
                    .ok_or_else(|| Error::Usage(format!("unbalanced parentheses in `{s}`")))?;
                let args = s[open + 1..close]
                    .split(',')
                    .map(|a| a.trim())
                    .filter(|a| !a.is_empty())
                    .map(|a| {
                        a.parse::<f64>()
                            .map_err(|_| Error::Usage(format!("bad number `{a}` in `{s}`")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                (s[..open].trim(), args)
            }
            None => (s, Vec::new()),
        };
        let arity = |want: &[usize]| -> Result<()> {
            if want.contains(&args.len()) {
                Ok(())
            } else {
                Err(Error::Usage(format!(
                    "`{name}` takes {want:?} arguments, got {}",
                    args.len()
                )))
            }
        };
        let two = |d: (f64, f64)| if args.is_empty() { d } else { (args[0], args[1]) };
        use DistributionModel::*;
        let model = match name.to_ascii_lowercase().as_str() {
            "uniform" | "unif" => {
                arity(&[0, 2])?;
                let (a, b) = two((0.0, 1.0));
                Uniform { a, b }
            }
            "beta" => {
                arity(&[2])?;
                Beta { alpha: args[0], beta: args[1] }
            }
            "normal" | "norm" | "gaussian" => {
                arity(&[0, 2])?;
                let (mu, sigma) = two((0.0, 1.0));
                Normal { mu, sigma }
            }
            "cauchy" => {
                arity(&[0, 2])?;
                let (loc, scale) = two((0.0, 1.0));
                Cauchy { loc, scale }
            }
            "laplace" | "double_exponential" => {
                arity(&[0, 2])?;
                let (loc, scale) = two((0.0, 1.0));
                Laplace { loc, scale }
            }
            "chisq" | "chi_squared" | "chisquared" => {
                arity(&[0, 1])?;
                ChiSquared { df: args.first().copied().unwrap_or(1.0) }
            }
            "exponential" | "exp" => {
                arity(&[0, 1])?;
                Exponential { rate: args.first().copied().unwrap_or(1.0) }
            }
            "lognormal" | "lnorm" => {
                arity(&[0, 2])?;
                let (mu, sigma) = two((0.0, 1.0));
                LogNormal { mu, sigma }
            }
            "mixture" | "normal_mixture" => {
                arity(&[5])?;
                NormalMixture {
                    weight: args[0],
                    mu1: args[1],
                    sigma1: args[2],
                    mu2: args[3],
                    sigma2: args[4],
                }
            }
            "bitriangle" | "bt" => {
                arity(&[1])?;
                BiTriangle { p: args[0] }
            }
            other => return Err(Error::Usage(format!("unknown distribution family `{other}`"))),
        };
        model.validate()?;
        Ok(model)
    }
}

impl TryFrom<String> for DistributionModel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DistributionModel> for String {
    fn from(d: DistributionModel) -> String {
        d.to_string()
    }
}

/// Right-continuous step CDF `(#values <= x) / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("empirical CDF needs at least one value".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("empirical CDF input contains NaN".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn count_le(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v <= x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.sorted.len() as f64
    }

    /// The `k`-th smallest value, 1-based.
    pub fn order_statistic(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.sorted.get(i).copied())
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }
}

pub fn ecdf_build(values: &[f64]) -> Result<EmpiricalCdf> {
    EmpiricalCdf::new(values)
}

pub fn ecdf_eval(ecdf: &EmpiricalCdf, x: f64) -> f64 {
    ecdf.eval(x)
}

/// Normal distribution with moment estimates; the standard deviation uses
/// the `n - 1` divisor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalFit {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl NormalFit {
    pub fn cdf(&self, x: f64) -> f64 {
        standard_normal_cdf((x - self.mean) / self.sd)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.mean + self.sd * standard_normal_quantile(u)
    }

    pub fn model(&self) -> DistributionModel {
        DistributionModel::Normal { mu: self.mean, sigma: self.sd }
    }
}

pub fn fit_normal(values: &[f64]) -> Result<NormalFit> {
    let n = values.len();
    if n < 2 {
        return Err(Error::DegenerateFit(format!("normal fit needs at least 2 values, got {n}")));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (n - 1) as f64).sqrt();
    if !(sd > 0.0 && sd.is_finite()) {
        return Err(Error::DegenerateFit(format!("sample standard deviation is {sd}")));
    }
    Ok(NormalFit { mean, sd, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64Mcg;

    fn test_grid() -> Vec<DistributionModel> {
        use DistributionModel::*;
        vec![
            Uniform { a: 0.0, b: 1.0 },
            Uniform { a: -2.0, b: 3.0 },
            Beta { alpha: 0.5, beta: 0.5 },
            Beta { alpha: 2.0, beta: 2.0 },
            Beta { alpha: 10.0, beta: 10.0 },
            Beta { alpha: 2.0, beta: 10.0 },
            Beta { alpha: 10.0, beta: 2.0 },
            Beta { alpha: 1.0, beta: 3.0 },
            Normal { mu: 0.0, sigma: 1.0 },
            Normal { mu: 3.0, sigma: 2.0 },
            Cauchy { loc: 0.0, scale: 1.0 },
            Laplace { loc: 0.0, scale: 1.0 },
            ChiSquared { df: 1.0 },
            ChiSquared { df: 3.0 },
            Exponential { rate: 1.0 },
            LogNormal { mu: 0.0, sigma: 1.0 },
            NormalMixture { weight: 0.5, mu1: 0.0, sigma1: 1.0, mu2: 5.0, sigma2: 1.0 },
            NormalMixture { weight: 0.75, mu1: 0.0, sigma1: 1.0, mu2: 5.0, sigma2: 2.0 },
            BiTriangle { p: 0.3 },
            BiTriangle { p: 0.5 },
        ]
    }

    #[test]
    fn spec_point_values() {
        let u = DistributionModel::STANDARD_UNIFORM;
        assert_eq!(u.cdf(0.3).unwrap(), 0.3);
        assert_eq!(u.quantile(0.25).unwrap(), 0.25);
        assert_eq!(u.pdf(0.5).unwrap(), 1.0);
        assert_eq!(DistributionModel::STANDARD_NORMAL.cdf(0.0).unwrap(), 0.5);

        let bt = DistributionModel::BiTriangle { p: 0.3 };
        assert!((bt.cdf(0.3).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(bt.pdf(0.0).unwrap(), 2.0);
        assert_eq!(bt.pdf(0.3).unwrap(), 0.0);

        let e = DistributionModel::Exponential { rate: 1.0 };
        assert!((e.quantile(0.5).unwrap() - 2f64.ln()).abs() < 1e-14);

        let mix = DistributionModel::NormalMixture { weight: 0.5, mu1: 0.0, sigma1: 1.0, mu2: 5.0, sigma2: 1.0 };
        assert!((mix.quantile(0.5).unwrap() - 2.5).abs() < 1e-10);
    }

    #[test]
    fn cdf_monotone_and_inverts_quantile() {
        for d in test_grid() {
            let (lo, hi) = d.support();
            let q01 = d.quantile(0.001).unwrap();
            let q99 = d.quantile(0.999).unwrap();
            let (a, b) = (lo.max(q01 - 1.0), hi.min(q99 + 1.0));
            let mut prev = -1.0;
            for i in 0..200 {
                let x = a + (b - a) * i as f64 / 199.0;
                let c = d.cdf(x).unwrap();
                assert!(c >= prev, "{d}: cdf decreased at {x}");
                assert!((0.0..=1.0).contains(&c));
                prev = c;
            }
            for i in 1..100 {
                let u = i as f64 / 100.0;
                let x = d.quantile(u).unwrap();
                let back = d.cdf(x).unwrap();
                assert!((back - u).abs() <= 1e-8, "{d}: cdf(quantile({u})) = {back}");
            }
            assert_eq!(d.cdf(f64::NEG_INFINITY).unwrap(), 0.0);
            assert_eq!(d.cdf(f64::INFINITY).unwrap(), 1.0);
        }
    }

    #[test]
    fn quantile_relative_accuracy() {
        for d in test_grid() {
            for &u in &[1e-6, 0.01, 0.25, 0.5, 0.8, 0.99, 1.0 - 1e-6] {
                let back = d.cdf(d.quantile(u).unwrap()).unwrap();
                let tol = if u < 0.5 { 1e-10 * u } else { 1e-10 };
                assert!((back - u).abs() <= tol, "{d} u={u} back={back}");
            }
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        use DistributionModel::*;
        for d in [
            Uniform { a: 1.0, b: 1.0 },
            Beta { alpha: 0.0, beta: 1.0 },
            Normal { mu: 0.0, sigma: -1.0 },
            Cauchy { loc: 0.0, scale: 0.0 },
            ChiSquared { df: 0.0 },
            Exponential { rate: -2.0 },
            NormalMixture { weight: 1.0, mu1: 0.0, sigma1: 1.0, mu2: 1.0, sigma2: 1.0 },
            BiTriangle { p: 1.0 },
        ] {
            assert!(matches!(d.cdf(0.5), Err(Error::ParameterDomain(_))), "{d:?}");
        }
        let u = DistributionModel::STANDARD_UNIFORM;
        assert!(matches!(u.quantile(0.0), Err(Error::Domain(_))));
        assert!(matches!(u.quantile(1.0), Err(Error::Domain(_))));
        assert!(u.cdf(f64::NAN).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_centered() {
        let u = DistributionModel::STANDARD_UNIFORM;
        let mut rng = Pcg64Mcg::seed_from_u64(7);
        assert!(u.sample(&mut rng, 0).unwrap().is_empty());
        let a = u.sample(&mut Pcg64Mcg::seed_from_u64(11), 100_000).unwrap();
        let b = u.sample(&mut Pcg64Mcg::seed_from_u64(11), 100_000).unwrap();
        assert_eq!(a, b);
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for d in test_grid() {
            let back: DistributionModel = d.to_string().parse().unwrap();
            assert_eq!(back, d);
        }
        assert_eq!("normal".parse::<DistributionModel>().unwrap(), DistributionModel::STANDARD_NORMAL);
        assert!("beta(2)".parse::<DistributionModel>().is_err());
        assert!("weibull(1,2)".parse::<DistributionModel>().is_err());
    }

    #[test]
    fn ecdf_convention() {
        let e = ecdf_build(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(ecdf_eval(&e, 2.0), 2.0 / 3.0);
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(3.0), 1.0);
        assert_eq!(e.eval(10.0), 1.0);
        assert_eq!(e.order_statistic(1), Some(1.0));
        assert_eq!(e.order_statistic(0), None);
        assert!(matches!(ecdf_build(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn ecdf_of_uniform_draws() {
        let xs = DistributionModel::STANDARD_UNIFORM
            .sample(&mut Pcg64Mcg::seed_from_u64(3), 10_000)
            .unwrap();
        let e = ecdf_build(&xs).unwrap();
        assert!((e.eval(0.5) - 0.5).abs() < 0.02);
    }

    #[test]
    fn normal_fit() {
        let f = fit_normal(&[0.0, 2.0]).unwrap();
        assert_eq!(f.mean, 1.0);
        assert!((f.sd - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(fit_normal(&[5.0, 5.0, 5.0]), Err(Error::DegenerateFit(_))));
        assert!(matches!(fit_normal(&[5.0]), Err(Error::DegenerateFit(_))));

        let xs = DistributionModel::Normal { mu: 3.0, sigma: 2.0 }
            .sample(&mut Pcg64Mcg::seed_from_u64(5), 10_000)
            .unwrap();
        let f = fit_normal(&xs).unwrap();
        assert!((f.mean - 3.0).abs() < 3.0 * 2.0 / 100.0);
    }
}
