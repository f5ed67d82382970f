use rand::distr::Open01;
use rand::Rng;

use super::config::{ExperimentConfig, TrainSpec, Transform, Unlabeled};
use super::curve::{CurvePoint, ErrorSums, RiskCurve};
use super::seed::replicate_rng;
use super::replicate_chunks;
use crate::distributions::{fit_normal, DistributionModel};
use crate::error::{Error, Result};
use crate::supervised::{estimate_unchecked, EstimatorKind, SufficientStat};

const MAX_REDRAWS: u64 = 1000;

#[derive(Debug, Clone, Copy)]
enum Train {
    Continuous(DistributionModel),
    TwoPoint,
}

struct Cell {
    index: u64,
    test: DistributionModel,
    train: Train,
    same: bool,
    p: f64,
    /// The split expressed as a training-scale quantile.
    p_train: f64,
    n: usize,
    bounds: (f64, f64),
}

impl Cell {
    fn new(index: u64, test: DistributionModel, spec: TrainSpec, p: f64, n: usize) -> Result<Cell> {
        let train = match spec {
            TrainSpec::Same => Train::Continuous(test),
            TrainSpec::Fixed(d) => Train::Continuous(d),
            TrainSpec::BiTriangleAtSplit => Train::Continuous(DistributionModel::BiTriangle { p }),
            TrainSpec::TwoPoint => Train::TwoPoint,
        };
        let (p_train, bounds, same) = match train {
            Train::Continuous(d) if d == test => (p, d.support(), true),
            Train::Continuous(d) => (d.cdf_unchecked(test.quantile_unchecked(p)?), d.support(), false),
            Train::TwoPoint => (p, (0.0, 1.0), false),
        };
        Ok(Cell { index, test, train, same, p, p_train, n, bounds })
    }

    fn train_quantile(&self, u: f64) -> Result<f64> {
        match self.train {
            Train::Continuous(d) => d.quantile_unchecked(u),
            Train::TwoPoint => Ok(if u < self.p { 0.0 } else { 1.0 }),
        }
    }

    /// Test-scale position of a training-scale quantile.
    fn train_u_to_test(&self, u: f64) -> Result<f64> {
        if self.same || u <= 0.0 || u >= 1.0 {
            return Ok(u.clamp(0.0, 1.0));
        }
        Ok(self.test.cdf_unchecked(self.train_quantile(u)?))
    }
}

#[derive(Debug, Clone)]
struct Series {
    transform: Transform,
    kind: EstimatorKind,
}

fn series_list(cfg: &ExperimentConfig) -> Vec<Series> {
    let mut out = Vec::new();
    for &kind in &cfg.kinds {
        if kind == EstimatorKind::XScale {
            out.push(Series { transform: Transform::Raw, kind });
        } else {
            out.extend(cfg.transforms.iter().map(|&transform| Series { transform, kind }));
        }
    }
    out
}

#[derive(Default)]
struct Workspace {
    u: Vec<f64>,
    x: Vec<f64>,
    unlabeled: Vec<f64>,
    pooled: Vec<f64>,
}

/// Runs one replicate, adding the error of every series into `sums`.
/// Returns the number of redraws caused by degenerate normal fits.
fn replicate<R: Rng>(
    cell: &Cell,
    series: &[Series],
    needs_fit: bool,
    max_m: usize,
    rng: &mut R,
    ws: &mut Workspace,
    sums: &mut [ErrorSums],
) -> Result<u64> {
    let n = cell.n;
    let mut redraws = 0;
    let fit = loop {
        ws.u.clear();
        ws.u.extend((0..n).map(|_| rng.sample::<f64, _>(Open01)));
        if !needs_fit {
            break None;
        }
        ws.x.clear();
        for &u in &ws.u {
            ws.x.push(cell.train_quantile(u)?);
        }
        match fit_normal(&ws.x) {
            Ok(f) => break Some(f),
            Err(Error::DegenerateFit(_)) if redraws < MAX_REDRAWS => redraws += 1,
            Err(e) => return Err(e),
        }
    };
    if max_m > 0 {
        ws.unlabeled.clear();
        ws.unlabeled.extend((0..max_m).map(|_| rng.sample::<f64, _>(Open01)));
    }

    let mut k = 0;
    let mut lu = 0.0f64;
    let mut ru = 1.0f64;
    for &u in &ws.u {
        if u < cell.p_train {
            k += 1;
            lu = lu.max(u);
        } else {
            ru = ru.min(u);
        }
    }
    let stat_u = SufficientStat { l: lu, r: ru, k, n, lo: 0.0, hi: 1.0 };
    let (lo, hi) = cell.bounds;
    let lx = if k > 0 { cell.train_quantile(lu)? } else { lo };
    let rx = if k < n { cell.train_quantile(ru)? } else { hi };
    let stat_x = SufficientStat { l: lx, r: rx, k, n, lo, hi };

    for (s, acc) in series.iter().zip(sums.iter_mut()) {
        let p_hat = if s.kind == EstimatorKind::Y {
            k as f64 / n as f64
        } else if s.kind == EstimatorKind::XScale {
            cell.test.cdf_unchecked(0.5 * (lx + rx))
        } else {
            match s.transform {
                Transform::Raw => cell.test.cdf_unchecked(estimate_unchecked(s.kind, &stat_x)),
                Transform::TrueCdf => estimate_unchecked(s.kind, &stat_u),
                Transform::NormalFit => {
                    let f = fit.as_ref().expect("fit is computed when a normal_fit series exists");
                    let st = SufficientStat {
                        l: if k > 0 { f.cdf(lx) } else { 0.0 },
                        r: if k < n { f.cdf(rx) } else { 1.0 },
                        ..stat_u
                    };
                    let w = estimate_unchecked(s.kind, &st);
                    cell.test.cdf_unchecked(f.quantile(w))
                }
                Transform::Ecdf(m) => ecdf_estimate(cell, s.kind, &stat_u, &ws.u, &ws.unlabeled[..m.count(n)], &mut ws.pooled)?,
            }
        };
        acc.push(p_hat - cell.p);
    }
    Ok(redraws)
}

/// Estimate through the empirical CDF of the pooled labeled and unlabeled
/// values, mapped back to the boundary it induces on new points: a point is
/// class 1 when its empirical CDF value is below the estimate, i.e. when it
/// lies below the `ceil(w N)`-th pooled order statistic.
fn ecdf_estimate(
    cell: &Cell,
    kind: EstimatorKind,
    stat_u: &SufficientStat,
    labeled: &[f64],
    unlabeled: &[f64],
    pooled: &mut Vec<f64>,
) -> Result<f64> {
    let (k, n) = (stat_u.k, stat_u.n);
    let total = labeled.len() + unlabeled.len();
    let below = |v: f64| unlabeled.iter().filter(|&&u| u <= v).count();
    let a = if k > 0 { k + below(stat_u.l) } else { 0 };
    let b = if k < n { k + 1 + below(stat_u.r) } else { total };
    let nf = total as f64;
    let st = SufficientStat { l: a as f64 / nf, r: b as f64 / nf, ..*stat_u };
    let w = estimate_unchecked(kind, &st);
    if w <= 0.0 {
        return Ok(0.0);
    }
    if w >= 1.0 {
        return Ok(1.0);
    }
    let rank = ((w * nf - 1e-9).ceil() as usize).clamp(1, total);
    pooled.clear();
    pooled.extend_from_slice(labeled);
    pooled.extend_from_slice(unlabeled);
    let (_, boundary, _) = pooled.select_nth_unstable_by(rank - 1, f64::total_cmp);
    cell.train_u_to_test(*boundary)
}

fn run_cell(cell: &Cell, series: &[Series], seed: u64, reps: usize) -> Result<(Vec<ErrorSums>, u64)> {
    let needs_fit = series.iter().any(|s| s.transform == Transform::NormalFit && s.kind != EstimatorKind::XScale);
    let max_m = series
        .iter()
        .filter_map(|s| match s.transform {
            Transform::Ecdf(m) => Some(m.count(cell.n)),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let (sums, redraws, _) = replicate_chunks(
        reps,
        || (vec![ErrorSums::default(); series.len()], 0u64, Workspace::default()),
        |rep, (sums, redraws, ws)| {
            let mut rng = replicate_rng(seed, cell.index, rep as u64);
            *redraws += replicate(cell, series, needs_fit, max_m, &mut rng, ws, sums)?;
            Ok(())
        },
        |total, (sums, redraws, _)| {
            for (t, s) in total.0.iter_mut().zip(&sums) {
                t.merge(s);
            }
            total.1 += redraws;
        },
    )?;
    Ok((sums, redraws))
}

/// Simulates every (distribution, n, p) cell of the grid. All series of a
/// cell are scored on the same replicate samples. Rows are ordered by
/// distribution, series (kind, then transform), n and p.
pub fn simulate_risk(cfg: &ExperimentConfig) -> Result<RiskCurve> {
    cfg.validate()?;
    let series = series_list(cfg);
    let (nn, np) = (cfg.n.len(), cfg.p.len());
    let mut points = Vec::new();
    let mut degenerate = 0;
    for (di, test) in cfg.distributions.iter().enumerate() {
        let label = match cfg.train {
            TrainSpec::Same => test.to_string(),
            other => format!("{other}|{test}"),
        };
        let mut grid = Vec::with_capacity(nn * np);
        for (ni, &n) in cfg.n.iter().enumerate() {
            for (pi, &p) in cfg.p.iter().enumerate() {
                let index = ((di * nn + ni) * np + pi) as u64;
                let cell = Cell::new(index, *test, cfg.train, p, n)?;
                let (sums, r) = run_cell(&cell, &series, cfg.seed, cfg.reps)?;
                degenerate += r;
                grid.push(sums);
            }
        }
        for (si, s) in series.iter().enumerate() {
            for (ni, &n) in cfg.n.iter().enumerate() {
                for (pi, &p) in cfg.p.iter().enumerate() {
                    points.push(CurvePoint::from_sums(
                        label.clone(),
                        s.transform.to_string(),
                        s.kind,
                        n,
                        p,
                        &grid[ni * np + pi][si],
                    ));
                }
            }
        }
    }
    Ok(RiskCurve { points, degenerate_fits: degenerate })
}

/// Compares the exact quantile transform with the empirical one built from
/// the labeled values plus `m` unlabeled values.
pub fn simulate_ecdf_transform(cfg: &ExperimentConfig, m: usize) -> Result<RiskCurve> {
    let cfg = ExperimentConfig {
        transforms: vec![Transform::TrueCdf, Transform::Ecdf(Unlabeled::Count(m))],
        ..cfg.clone()
    };
    simulate_risk(&cfg)
}

/// Compares the exact quantile transform with a fitted normal CDF.
pub fn simulate_parametric_transform(cfg: &ExperimentConfig) -> Result<RiskCurve> {
    let cfg = ExperimentConfig { transforms: vec![Transform::TrueCdf, Transform::NormalFit], ..cfg.clone() };
    simulate_risk(&cfg)
}

/// Trains on `train` and scores on the quantile scale of `test`.
pub fn simulate_mismatch(train: TrainSpec, test: DistributionModel, cfg: &ExperimentConfig) -> Result<RiskCurve> {
    let cfg = ExperimentConfig { distributions: vec![test], train, ..cfg.clone() };
    simulate_risk(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::CHUNK;
    use crate::risk::{risk, Measure, RiskQuery};

    fn small(kinds: Vec<EstimatorKind>, transforms: Vec<Transform>) -> ExperimentConfig {
        ExperimentConfig {
            p: vec![0.3, 0.5],
            n: vec![5],
            kinds,
            transforms,
            reps: 3000,
            seed: 11,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn uniform_b_matches_closed_form() {
        let c = simulate_risk(&small(vec![EstimatorKind::B], vec![Transform::TrueCdf])).unwrap();
        for pt in &c.points {
            let q = RiskQuery { kind: EstimatorKind::B, n: 5, p: pt.p, measure: Measure::Mae };
            let want = risk(&q).unwrap().value().unwrap();
            assert!((pt.mae - want).abs() < 4.0 * pt.se, "{pt:?} vs {want}");
        }
    }

    #[test]
    fn common_random_numbers_across_transforms() {
        // on the standard uniform the raw and exact transforms see identical values
        let c = simulate_risk(&small(
            vec![EstimatorKind::B, EstimatorKind::XScale],
            vec![Transform::Raw, Transform::TrueCdf],
        ))
        .unwrap();
        for p in [0.3, 0.5] {
            let raw = c.find("raw", EstimatorKind::B, 5, p).unwrap();
            let cdf = c.find("true_cdf", EstimatorKind::B, 5, p).unwrap();
            let x = c.find("raw", EstimatorKind::XScale, 5, p).unwrap();
            assert!((raw.mae - cdf.mae).abs() < 1e-12);
            assert_eq!(raw.mae, x.mae);
        }
    }

    #[test]
    fn two_point_midpoint_is_exact() {
        let cfg = ExperimentConfig {
            train: TrainSpec::TwoPoint,
            kinds: vec![EstimatorKind::XScale, EstimatorKind::B],
            transforms: vec![Transform::Raw],
            ..small(vec![], vec![])
        };
        let c = simulate_risk(&cfg).unwrap();
        for pt in &c.points {
            assert_eq!(pt.mae, (0.5 - pt.p).abs());
            assert_eq!(pt.se, 0.0);
        }
    }

    #[test]
    fn chunking_is_invisible() {
        let cfg = ExperimentConfig { reps: CHUNK * 2 + 7, ..small(vec![EstimatorKind::L], vec![Transform::TrueCdf]) };
        let a = simulate_risk(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| simulate_risk(&cfg)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points[0].reps, (CHUNK * 2 + 7) as u64);
    }
}
