use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionModel;
use crate::error::{Error, Result};
use crate::supervised::EstimatorKind;

/// How the predictor is mapped before the estimator is applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Transform {
    /// Estimate directly in raw X units.
    Raw,
    /// Apply the exact CDF of the training distribution.
    TrueCdf,
    /// Apply a normal CDF fitted to the labeled values.
    NormalFit,
    /// Apply the empirical CDF of labeled plus unlabeled values.
    Ecdf(Unlabeled),
}

/// Size of the unlabeled pool for the empirical transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Unlabeled {
    Count(usize),
    /// Unlabeled-to-labeled ratio; the pool holds `round(r * n)` values.
    Ratio(f64),
}

impl Unlabeled {
    pub fn count(&self, n: usize) -> usize {
        match *self {
            Unlabeled::Count(m) => m,
            Unlabeled::Ratio(r) => (r * n as f64).round() as usize,
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Raw => f.write_str("raw"),
            Transform::TrueCdf => f.write_str("true_cdf"),
            Transform::NormalFit => f.write_str("normal_fit"),
            Transform::Ecdf(Unlabeled::Count(m)) => write!(f, "ecdf(m={m})"),
            Transform::Ecdf(Unlabeled::Ratio(r)) => write!(f, "ecdf(r={r})"),
        }
    }
}

impl FromStr for Transform {
    type Err = Error;

    /// Accepts `raw`, `true_cdf`, `normal_fit`, `ecdf(m=COUNT)` and
    /// `ecdf(r=RATIO)`; a bare `ecdf(COUNT)` is a count.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace('-', "_");
        match t.as_str() {
            "raw" | "none" | "x" => return Ok(Transform::Raw),
            "true_cdf" | "cdf" | "quantile" => return Ok(Transform::TrueCdf),
            "normal_fit" | "parametric" | "normal" => return Ok(Transform::NormalFit),
            _ => {}
        }
        let bad = || Error::Usage(format!("unknown transform `{s}`; expected raw, true_cdf, normal_fit, ecdf(m=COUNT) or ecdf(r=RATIO)"));
        let inner = t
            .strip_prefix("ecdf(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?
            .replace(' ', "");
        let unlabeled = if let Some(r) = inner.strip_prefix("r=") {
            let r: f64 = r.parse().map_err(|_| bad())?;
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::Usage(format!("ecdf ratio must be >= 0, got {r}")));
            }
            Unlabeled::Ratio(r)
        } else {
            let m = inner.strip_prefix("m=").unwrap_or(&inner);
            Unlabeled::Count(m.parse().map_err(|_| bad())?)
        };
        Ok(Transform::Ecdf(unlabeled))
    }
}

impl TryFrom<String> for Transform {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Transform> for String {
    fn from(t: Transform) -> String {
        t.to_string()
    }
}

/// Where training values come from, relative to the test distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TrainSpec {
    Same,
    Fixed(DistributionModel),
    /// Bi-triangle whose zero-density apex sits at the cell's test split.
    BiTriangleAtSplit,
    /// Mass `p` at 0 and `1 - p` at 1, so the class-1 share matches the test.
    TwoPoint,
}

impl fmt::Display for TrainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainSpec::Same => f.write_str("same"),
            TrainSpec::Fixed(d) => write!(f, "{d}"),
            TrainSpec::BiTriangleAtSplit => f.write_str("bitriangle"),
            TrainSpec::TwoPoint => f.write_str("two_point"),
        }
    }
}

impl FromStr for TrainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "same" => Ok(TrainSpec::Same),
            "bitriangle" | "bt" => Ok(TrainSpec::BiTriangleAtSplit),
            "two_point" | "twopoint" | "bernoulli" => Ok(TrainSpec::TwoPoint),
            _ => Ok(TrainSpec::Fixed(s.parse()?)),
        }
    }
}

impl TryFrom<String> for TrainSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TrainSpec> for String {
    fn from(t: TrainSpec) -> String {
        t.to_string()
    }
}

pub fn default_p_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

pub fn default_n_list() -> Vec<usize> {
    vec![2, 10, 20, 100]
}

fn default_distributions() -> Vec<DistributionModel> {
    vec![DistributionModel::STANDARD_UNIFORM]
}

fn default_kinds() -> Vec<EstimatorKind> {
    vec![EstimatorKind::B]
}

fn default_transforms() -> Vec<Transform> {
    vec![Transform::TrueCdf]
}

fn default_reps() -> usize {
    100_000
}

fn default_train() -> TrainSpec {
    TrainSpec::Same
}

/// A full simulation grid. Every key is optional in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Test distributions; training values come from `train`.
    #[serde(default = "default_distributions")]
    pub distributions: Vec<DistributionModel>,
    #[serde(default = "default_p_grid")]
    pub p: Vec<f64>,
    #[serde(default = "default_n_list")]
    pub n: Vec<usize>,
    #[serde(default = "default_kinds")]
    pub kinds: Vec<EstimatorKind>,
    #[serde(default = "default_transforms")]
    pub transforms: Vec<Transform>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_train")]
    pub train: TrainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            distributions: default_distributions(),
            p: default_p_grid(),
            n: default_n_list(),
            kinds: default_kinds(),
            transforms: default_transforms(),
            reps: default_reps(),
            seed: 0,
            train: default_train(),
            out: None,
            plot: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let span = e.span().map(|s| format!(" (bytes {}..{})", s.start, s.end)).unwrap_or_default();
            Error::config("<config>", format!("{}{span}", e.message()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = |len: usize, key: &str| {
            if len == 0 {
                Err(Error::config(key, "must not be empty"))
            } else {
                Ok(())
            }
        };
        nonempty(self.distributions.len(), "distributions")?;
        nonempty(self.p.len(), "p")?;
        nonempty(self.n.len(), "n")?;
        nonempty(self.kinds.len(), "kinds")?;
        if self.reps == 0 {
            return Err(Error::config("reps", "must be at least 1"));
        }
        for (i, d) in self.distributions.iter().enumerate() {
            d.validate().map_err(|e| Error::config(format!("distributions[{i}]"), e.to_string()))?;
        }
        for (i, &p) in self.p.iter().enumerate() {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::config(format!("p[{i}]"), format!("{p} is outside (0, 1)")));
            }
        }
        for (i, &n) in self.n.iter().enumerate() {
            if n == 0 {
                return Err(Error::config(format!("n[{i}]"), "sample size must be at least 1"));
            }
        }
        let quantile_kinds = self.kinds.iter().any(|&k| k != EstimatorKind::XScale);
        if quantile_kinds && self.transforms.is_empty() {
            return Err(Error::config("transforms", "must not be empty when non-X_SCALE kinds are requested"));
        }
        let min_n = self.n.iter().copied().min().unwrap_or(0);
        for (i, t) in self.transforms.iter().enumerate() {
            let key = format!("transforms[{i}]");
            match t {
                Transform::NormalFit if min_n < 2 => {
                    return Err(Error::config(key, "normal_fit needs every n >= 2"));
                }
                Transform::Ecdf(Unlabeled::Ratio(r)) if !(*r >= 0.0 && r.is_finite()) => {
                    return Err(Error::config(key, format!("ecdf ratio must be >= 0, got {r}")));
                }
                _ => {}
            }
            if self.train == TrainSpec::TwoPoint && *t != Transform::Raw {
                return Err(Error::config(key, "a two-point training distribution only supports the raw transform"));
            }
            if *t == Transform::Raw && self.kinds.contains(&EstimatorKind::RB) {
                for (j, d) in self.distributions.iter().enumerate() {
                    let support = match self.train {
                        TrainSpec::Fixed(t) => t.support(),
                        TrainSpec::Same => d.support(),
                        _ => (0.0, 1.0),
                    };
                    if !(support.0.is_finite() && support.1.is_finite()) {
                        return Err(Error::config(
                            format!("kinds (with distributions[{j}])"),
                            "RB in raw units needs a bounded training support",
                        ));
                    }
                }
            }
        }
        if let TrainSpec::Fixed(d) = self.train {
            d.validate().map_err(|e| Error::config("train", e.to_string()))?;
        }
        Ok(())
    }
}
