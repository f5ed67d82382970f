//! Preconfigured experiments, one per published figure family.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionModel;
use crate::error::{Error, Result};
use crate::montecarlo::config::{default_n_list, default_p_grid};
use crate::montecarlo::{simulate_risk, ExperimentConfig, TrainSpec, Transform, Unlabeled};
use crate::report::{circle_panels, curve_panels, render_svg, splitsets_panels, table_panels, CsvReport, RiskTable};
use crate::risk::Measure;
use crate::supervised::EstimatorKind;
use crate::tree::{simulate_circle, simulate_splitting_sets, CircleConfig, SplitSetsConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Rmse,
    Mae,
    Beta,
    Common,
    Mixture,
    Parametric,
    Ecdf,
    Splitsets,
    Circle,
    Bitriangle,
}

impl FigureId {
    pub const ALL: [FigureId; 10] = [
        FigureId::Rmse,
        FigureId::Mae,
        FigureId::Beta,
        FigureId::Common,
        FigureId::Mixture,
        FigureId::Parametric,
        FigureId::Ecdf,
        FigureId::Splitsets,
        FigureId::Circle,
        FigureId::Bitriangle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Rmse => "rmse",
            FigureId::Mae => "mae",
            FigureId::Beta => "beta",
            FigureId::Common => "common",
            FigureId::Mixture => "mixture",
            FigureId::Parametric => "parametric",
            FigureId::Ecdf => "ecdf",
            FigureId::Splitsets => "splitsets",
            FigureId::Circle => "circle",
            FigureId::Bitriangle => "bitriangle",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        FigureId::ALL.into_iter().find(|f| f.name() == t).ok_or_else(|| {
            let ids: Vec<&str> = FigureId::ALL.iter().map(|f| f.name()).collect();
            Error::Usage(format!("unknown figure `{s}`; valid ids: {}", ids.join(", ")))
        })
    }
}

/// Replicate budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// 100 000 replicates per grid point.
    Full,
    /// 10 000 replicates per grid point.
    Desk,
    /// 1 000 replicates per grid point, for quick checks.
    Smoke,
}

impl Profile {
    pub fn reps(&self) -> usize {
        match self {
            Profile::Full => 100_000,
            Profile::Desk => 10_000,
            Profile::Smoke => 1_000,
        }
    }
}

impl FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Profile::Full),
            "desk" => Ok(Profile::Desk),
            "smoke" => Ok(Profile::Smoke),
            _ => Err(Error::Usage(format!("unknown profile `{s}`; expected full, desk or smoke"))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Full => "full",
            Profile::Desk => "desk",
            Profile::Smoke => "smoke",
        })
    }
}

/// Beta shapes of the density panel.
pub fn beta_presets() -> Vec<DistributionModel> {
    [(0.5, 0.5), (2.0, 2.0), (10.0, 10.0), (2.0, 10.0), (10.0, 2.0), (1.0, 3.0)]
        .into_iter()
        .map(|(alpha, beta)| DistributionModel::Beta { alpha, beta })
        .collect()
}

/// Cauchy, standard normal, Laplace, chi-squared (1 df), standard
/// exponential and standard log-normal.
pub fn common_presets() -> Vec<DistributionModel> {
    use DistributionModel::*;
    vec![
        Cauchy { loc: 0.0, scale: 1.0 },
        Normal { mu: 0.0, sigma: 1.0 },
        Laplace { loc: 0.0, scale: 1.0 },
        ChiSquared { df: 1.0 },
        Exponential { rate: 1.0 },
        LogNormal { mu: 0.0, sigma: 1.0 },
    ]
}

/// Two-component normal mixtures: N(0,1) with weight 0.5 or 0.75 against
/// N(5,1) or N(5,2).
pub fn mixture_presets() -> Vec<DistributionModel> {
    let mut out = Vec::new();
    for weight in [0.5, 0.75] {
        for sigma2 in [1.0, 2.0] {
            out.push(DistributionModel::NormalMixture { weight, mu1: 0.0, sigma1: 1.0, mu2: 5.0, sigma2 });
        }
    }
    out
}

/// Coarser `p` grid for the costly unlabeled-pool experiment.
fn coarse_p_grid() -> Vec<f64> {
    (1..20).map(|i| i as f64 / 20.0).collect()
}

fn experiment(reps: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig { reps, seed, p: default_p_grid(), n: default_n_list(), ..ExperimentConfig::default() }
}

/// Simulation settings behind a figure. Closed-form figures have none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FigureConfig {
    Analytic { kinds: Vec<EstimatorKind>, n: Vec<usize>, p: Vec<f64>, measures: Vec<Measure> },
    Risk { experiment: ExperimentConfig, analytic_mae: bool },
    Splitsets(SplitSetsConfig),
    Circle(CircleConfig),
}

pub fn figure_config(id: FigureId, profile: Profile, seed: u64) -> FigureConfig {
    use EstimatorKind::*;
    let reps = profile.reps();
    let base = experiment(reps, seed);
    let quantile_vs_raw = |distributions| ExperimentConfig {
        distributions,
        kinds: vec![B, XScale],
        transforms: vec![Transform::TrueCdf],
        ..base.clone()
    };
    match id {
        FigureId::Rmse => FigureConfig::Analytic {
            kinds: vec![L, R, B, RB, SL, SR, SB],
            n: default_n_list(),
            p: default_p_grid(),
            measures: vec![Measure::Rmse],
        },
        FigureId::Mae => FigureConfig::Risk {
            experiment: ExperimentConfig { kinds: vec![L, R, B, RB], transforms: vec![Transform::TrueCdf], ..base },
            analytic_mae: true,
        },
        FigureId::Beta => FigureConfig::Risk { experiment: quantile_vs_raw(beta_presets()), analytic_mae: false },
        FigureId::Common => FigureConfig::Risk { experiment: quantile_vs_raw(common_presets()), analytic_mae: false },
        FigureId::Mixture => FigureConfig::Risk { experiment: quantile_vs_raw(mixture_presets()), analytic_mae: false },
        FigureId::Parametric => FigureConfig::Risk {
            experiment: ExperimentConfig {
                distributions: vec![DistributionModel::STANDARD_NORMAL],
                kinds: vec![B, XScale],
                transforms: vec![Transform::TrueCdf, Transform::NormalFit],
                ..base
            },
            analytic_mae: false,
        },
        FigureId::Ecdf => {
            let mut transforms = vec![Transform::TrueCdf];
            transforms.extend([0, 10, 100, 1000].map(|m| Transform::Ecdf(Unlabeled::Count(m))));
            FigureConfig::Risk {
                experiment: ExperimentConfig {
                    distributions: vec![DistributionModel::STANDARD_NORMAL, DistributionModel::Exponential { rate: 1.0 }],
                    kinds: vec![B, XScale],
                    transforms,
                    p: coarse_p_grid(),
                    ..base
                },
                analytic_mae: false,
            }
        }
        FigureId::Bitriangle => FigureConfig::Risk {
            experiment: ExperimentConfig {
                train: TrainSpec::BiTriangleAtSplit,
                ..quantile_vs_raw(vec![DistributionModel::STANDARD_UNIFORM])
            },
            analytic_mae: false,
        },
        FigureId::Splitsets => FigureConfig::Splitsets(SplitSetsConfig { reps, seed, ..SplitSetsConfig::default() }),
        FigureId::Circle => FigureConfig::Circle(CircleConfig { reps, seed, ..CircleConfig::default() }),
    }
}

/// One output file of a bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureBundle {
    pub id: FigureId,
    pub profile: Profile,
    pub config: FigureConfig,
    pub files: Vec<BundleFile>,
}

impl FigureBundle {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }
}

/// Runs a figure's experiment. CSV files are always produced; SVG views of
/// them are added when `plots` is set.
pub fn run_figure(id: FigureId, profile: Profile, seed: u64, plots: bool) -> Result<FigureBundle> {
    let config = figure_config(id, profile, seed);
    let mut files = Vec::new();
    let mut add = |name: String, contents: String| files.push(BundleFile { name, contents });
    let title = format!("{id} ({profile})");
    match &config {
        FigureConfig::Analytic { kinds, n, p, measures } => {
            let table = RiskTable::compute(kinds, n, p, measures)?;
            add(format!("{id}.csv"), table.csv_string()?);
            if plots {
                add(format!("{id}.svg"), render_svg(&title, &table_panels(&table), 4));
            }
        }
        FigureConfig::Risk { experiment, analytic_mae } => {
            let curve = simulate_risk(experiment)?;
            add(format!("{id}.csv"), curve.csv_string()?);
            if plots {
                add(format!("{id}.svg"), render_svg(&title, &curve_panels(&curve), 4));
            }
            if *analytic_mae {
                let kinds: Vec<EstimatorKind> = experiment.kinds.iter().copied().filter(|&k| k != EstimatorKind::RB).collect();
                let table = RiskTable::compute(&kinds, &experiment.n, &experiment.p, &[Measure::Mae])?;
                add(format!("{id}_analytic.csv"), table.csv_string()?);
            }
        }
        FigureConfig::Splitsets(cfg) => {
            let report = simulate_splitting_sets(cfg)?;
            add(format!("{id}.csv"), report.csv_string()?);
            if plots {
                add(format!("{id}.svg"), render_svg(&title, &splitsets_panels(&report), 2));
            }
        }
        FigureConfig::Circle(cfg) => {
            let report = simulate_circle(cfg)?;
            add(format!("{id}.csv"), report.csv_string()?);
            if plots {
                add(format!("{id}.svg"), render_svg(&title, &circle_panels(&report), 2));
            }
        }
    }
    Ok(FigureBundle { id, profile, config, files })
}
