//! Labeled CSV ingestion and the subsample-then-score protocol: a split is
//! learned from `n` labeled rows and scored on the whole dataset.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::EmpiricalCdf;
use crate::error::{Error, Result};
use crate::montecarlo::curve::RunningMoments;
use crate::montecarlo::replicate_chunks;
use crate::montecarlo::seed::replicate_rng;
use crate::tree::{fit_stump, InterpolationRule, StumpFit};

/// One numeric predictor with a binary label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    values: Vec<f64>,
    labels: Vec<bool>,
    /// Rows dropped at load time for a missing value or label.
    pub dropped: usize,
}

impl LabeledDataset {
    pub fn new(values: Vec<f64>, labels: Vec<bool>) -> Result<Self> {
        if values.len() != labels.len() {
            return Err(Error::Data(format!("{} values but {} labels", values.len(), labels.len())));
        }
        if values.len() < 2 {
            return Err(Error::EmptyInput(format!("need at least 2 usable rows, got {}", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("row {i}: value {} is not finite", values[i])));
        }
        let ones = labels.iter().filter(|&&b| b).count();
        if ones == 0 || ones == labels.len() {
            return Err(Error::Data("both classes must be present".into()));
        }
        Ok(LabeledDataset { values, labels, dropped: 0 })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }
}

fn is_missing(s: &str) -> bool {
    matches!(s.trim().to_ascii_lowercase().as_str(), "" | "na" | "nan" | "null" | "none")
}

/// Reads `value_col` and `label_col` from a headed CSV. Rows where either is
/// missing (`""`, `NA`, `NaN`, `null`, `None`) are dropped and counted. The
/// label column may hold `positive` and one other category.
pub fn load_labeled_csv(path: &Path, value_col: &str, label_col: &str, positive: &str) -> Result<LabeledDataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(std::io::BufReader::new(file));
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| {
            Error::Schema(format!("column `{name}` not found; available: {}", headers.iter().collect::<Vec<_>>().join(", ")))
        })
    };
    let (vi, li) = (column(value_col)?, column(label_col)?);
    let positive = positive.trim();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut negatives = BTreeSet::new();
    let mut dropped = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let (v, l) = (record.get(vi).unwrap_or(""), record.get(li).unwrap_or(""));
        if is_missing(v) || is_missing(l) {
            dropped += 1;
            continue;
        }
        let x: f64 = v.trim().parse().map_err(|_| {
            Error::Schema(format!("row {}: `{value_col}` value `{v}` is not a number", row + 2))
        })?;
        let l = l.trim();
        if l != positive {
            negatives.insert(l.to_string());
        }
        values.push(x);
        labels.push(l == positive);
    }
    if negatives.len() > 1 {
        return Err(Error::Schema(format!(
            "label column `{label_col}` must hold `{positive}` and one other category; found {}",
            negatives.iter().map(|s| format!("`{s}`")).collect::<Vec<_>>().join(", ")
        )));
    }
    let mut data = LabeledDataset::new(values, labels)?;
    data.dropped = dropped;
    Ok(data)
}

/// Scale in which the threshold is placed inside the gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseScale {
    /// Midpoint in the raw value scale.
    X,
    /// Midpoint in the scale of the full-data empirical CDF.
    U,
    /// At the left end of the gap.
    L,
    /// At the right end of the gap.
    R,
}

impl CaseScale {
    pub const ALL: [CaseScale; 4] = [CaseScale::X, CaseScale::U, CaseScale::L, CaseScale::R];
}

impl fmt::Display for CaseScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for CaseScale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "X" => Ok(CaseScale::X),
            "U" => Ok(CaseScale::U),
            "L" => Ok(CaseScale::L),
            "R" => Ok(CaseScale::R),
            _ => Err(Error::Usage(format!("unknown scale `{s}`; expected X, U, L or R"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseStudyConfig {
    pub n: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub scales: Vec<CaseScale>,
}

impl Default for CaseStudyConfig {
    fn default() -> Self {
        CaseStudyConfig { n: vec![10, 20, 100, 1000], reps: 100_000, seed: 0, scales: CaseScale::ALL.to_vec() }
    }
}

/// Consecutive one-class subsamples tolerated before giving up.
const MAX_RETRIES: u64 = 100_000;

/// Full-data lookup tables: sorted values, the positives among the first
/// `i` sorted values, and the empirical CDF.
struct Scorer {
    sorted: Vec<f64>,
    positives_below: Vec<usize>,
    ecdf: EmpiricalCdf,
}

impl Scorer {
    fn new(data: &LabeledDataset) -> Result<Self> {
        let mut idx: Vec<usize> = (0..data.len()).collect();
        idx.sort_by(|&i, &j| data.values[i].total_cmp(&data.values[j]));
        let sorted: Vec<f64> = idx.iter().map(|&i| data.values[i]).collect();
        let mut positives_below = Vec::with_capacity(sorted.len() + 1);
        positives_below.push(0);
        for &i in &idx {
            positives_below.push(positives_below.last().unwrap() + data.labels[i] as usize);
        }
        Ok(Scorer { ecdf: EmpiricalCdf::new(&sorted)?, sorted, positives_below })
    }

    /// Number of sorted values on the left side, and the reported split.
    fn left_count(&self, scale: CaseScale, l_x: f64, r_x: f64) -> (usize, f64) {
        match scale {
            CaseScale::X => {
                let t = 0.5 * (l_x + r_x);
                (self.sorted.partition_point(|&v| v <= t), t)
            }
            CaseScale::L => (self.sorted.partition_point(|&v| v <= l_x), l_x),
            CaseScale::R => (self.sorted.partition_point(|&v| v < r_x), r_x),
            CaseScale::U => {
                // right iff eF(x) > (eF(L_X) + eF(R_X)) / 2, i.e. 2 cnt(x) > a + b
                let total = self.ecdf.count_le(l_x) + self.ecdf.count_le(r_x);
                let half = total / 2;
                let left = if half >= self.sorted.len() {
                    self.sorted.len()
                } else {
                    self.sorted.partition_point(|&v| v < self.sorted[half])
                };
                // largest value with eF(x) <= w, or the minimum when none is
                let split = self.sorted[left.max(1) - 1];
                (left, split)
            }
        }
    }

    fn error_rate(&self, left: usize, left_class: bool, right_class: bool) -> f64 {
        let n = self.sorted.len();
        let pos_left = self.positives_below[left];
        let pos_right = self.positives_below[n] - pos_left;
        let wrong_left = if left_class { left - pos_left } else { pos_left };
        let wrong_right = if right_class { (n - left) - pos_right } else { pos_right };
        (wrong_left + wrong_right) as f64 / n as f64
    }
}

/// Mean threshold and misclassification of one scale at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleSummary {
    pub scale: CaseScale,
    pub mean_split: f64,
    pub se_split: f64,
    pub error: f64,
    pub se_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyRow {
    pub n: usize,
    pub reps: u64,
    /// One-class or tied subsamples that were redrawn.
    pub retries: u64,
    pub scales: Vec<ScaleSummary>,
}

impl CaseStudyRow {
    pub fn get(&self, scale: CaseScale) -> Option<&ScaleSummary> {
        self.scales.iter().find(|s| s.scale == scale)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyReport {
    pub rows: Vec<CaseStudyRow>,
    pub dropped: usize,
}

impl CaseStudyReport {
    pub fn find(&self, n: usize) -> Option<&CaseStudyRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    /// One line per `n`: mean split per scale, then error per scale, then
    /// standard errors.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let Some(first) = self.rows.first() else {
            w.write_record(["n", "reps", "retries"])?;
            w.flush().map_err(|e| Error::io("<csv>", e))?;
            return Ok(());
        };
        let scales: Vec<CaseScale> = first.scales.iter().map(|s| s.scale).collect();
        let mut header = vec!["n".to_string()];
        for prefix in ["split", "error", "se_split", "se_error"] {
            header.extend(scales.iter().map(|s| format!("{prefix}_{s}")));
        }
        header.extend(["reps".to_string(), "retries".to_string()]);
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.n.to_string()];
            for pick in [
                |s: &ScaleSummary| s.mean_split,
                |s: &ScaleSummary| s.error,
                |s: &ScaleSummary| s.se_split,
                |s: &ScaleSummary| s.se_error,
            ] {
                rec.extend(r.scales.iter().map(|s| pick(s).to_string()));
            }
            rec.extend([r.reps.to_string(), r.retries.to_string()]);
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

impl CaseStudyConfig {
    pub fn validate(&self, rows: usize) -> Result<()> {
        if self.n.is_empty() {
            return Err(Error::config("n", "must not be empty"));
        }
        for (i, &n) in self.n.iter().enumerate() {
            if n < 2 || n > rows {
                return Err(Error::config(format!("n[{i}]"), format!("{n} is outside 2..={rows} (dataset rows)")));
            }
        }
        if self.reps == 0 {
            return Err(Error::config("reps", "must be at least 1"));
        }
        if self.scales.is_empty() {
            return Err(Error::config("scales", "must not be empty"));
        }
        Ok(())
    }
}

#[derive(Default)]
struct Acc {
    split: Vec<RunningMoments>,
    error: Vec<RunningMoments>,
    retries: u64,
    reps: u64,
}

/// Per replicate: draw `n` rows without replacement (redrawing samples
/// without a usable cut), fit the misclassification-optimal cut, place the
/// threshold by each scale's rule, and score it on every row.
pub fn resample_experiment(data: &LabeledDataset, cfg: &CaseStudyConfig) -> Result<CaseStudyReport> {
    cfg.validate(data.len())?;
    let scorer = Scorer::new(data)?;
    let k = cfg.scales.len();
    let mut rows = Vec::new();
    for (ni, &n) in cfg.n.iter().enumerate() {
        let acc = replicate_chunks(
            cfg.reps,
            || Acc { split: vec![RunningMoments::default(); k], error: vec![RunningMoments::default(); k], ..Acc::default() },
            |rep, acc| {
                let mut rng = replicate_rng(cfg.seed, ni as u64, rep as u64);
                let mut x = vec![0.0; n];
                let mut y = vec![false; n];
                let mut tries = 0;
                let stump = loop {
                    for (slot, i) in rand::seq::index::sample(&mut rng, data.len(), n).into_iter().enumerate() {
                        x[slot] = data.values[i];
                        y[slot] = data.labels[i];
                    }
                    if let StumpFit::Split(s) = fit_stump(&x, &y, InterpolationRule::Midpoint)? {
                        if y.iter().any(|&b| b) && y.iter().any(|&b| !b) {
                            break s;
                        }
                    }
                    tries += 1;
                    if tries >= MAX_RETRIES {
                        return Err(Error::Data(format!("no usable subsample of size {n} after {MAX_RETRIES} draws")));
                    }
                };
                acc.retries += tries;
                acc.reps += 1;
                for (j, &scale) in cfg.scales.iter().enumerate() {
                    let (left, split) = scorer.left_count(scale, stump.l_x, stump.r_x);
                    acc.split[j].push(split);
                    acc.error[j].push(scorer.error_rate(left, stump.left_class, stump.right_class));
                }
                Ok(())
            },
            |total, part| {
                for j in 0..k {
                    total.split[j].merge(&part.split[j]);
                    total.error[j].merge(&part.error[j]);
                }
                total.retries += part.retries;
                total.reps += part.reps;
            },
        )?;
        let scales = cfg
            .scales
            .iter()
            .enumerate()
            .map(|(j, &scale)| ScaleSummary {
                scale,
                mean_split: acc.split[j].mean(),
                se_split: acc.split[j].stderr(),
                error: acc.error[j].mean(),
                se_error: acc.error[j].stderr(),
            })
            .collect();
        rows.push(CaseStudyRow { n, reps: acc.reps, retries: acc.retries, scales });
    }
    Ok(CaseStudyReport { rows, dropped: data.dropped })
}
