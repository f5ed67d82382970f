use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::supervised::EstimatorKind;

/// Streaming mean and sum of squared deviations (Welford), mergeable with
/// Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let total = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * (nb / total);
        self.m2 += other.m2 + delta * delta * (na * nb / total);
        self.count += other.count;
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean, from the `n - 1` sample variance.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        let r = self.count as f64;
        (self.m2.max(0.0) / (r - 1.0) / r).sqrt()
    }
}

/// Running moments of a pair `(a, b)` measured on the same replicates,
/// including their co-moment, for ratio estimates.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairedMoments {
    a: RunningMoments,
    b: RunningMoments,
    cab: f64,
}

impl PairedMoments {
    pub fn push(&mut self, a: f64, b: f64) {
        let da = a - self.a.mean;
        self.a.push(a);
        self.b.push(b);
        self.cab += da * (b - self.b.mean);
    }

    pub fn merge(&mut self, other: &PairedMoments) {
        let (na, nb) = (self.a.count as f64, other.a.count as f64);
        if nb > 0.0 && na > 0.0 {
            let da = other.a.mean - self.a.mean;
            let db = other.b.mean - self.b.mean;
            self.cab += other.cab + da * db * (na * nb / (na + nb));
        } else if na == 0.0 {
            self.cab = other.cab;
        }
        self.a.merge(&other.a);
        self.b.merge(&other.b);
    }

    pub fn count(&self) -> u64 {
        self.a.count
    }

    pub fn first(&self) -> &RunningMoments {
        &self.a
    }

    pub fn second(&self) -> &RunningMoments {
        &self.b
    }

    /// Ratio of means `mean(a) / mean(b)`.
    pub fn ratio(&self) -> f64 {
        self.a.mean / self.b.mean
    }

    /// Delta-method standard error of `ratio`.
    pub fn se_ratio(&self) -> f64 {
        let r = self.a.count as f64;
        if r < 2.0 {
            return f64::NAN;
        }
        let (ma, mb) = (self.a.mean, self.b.mean);
        let var_a = self.a.m2 / (r - 1.0) / r;
        let var_b = self.b.m2 / (r - 1.0) / r;
        let cov = self.cab / (r - 1.0) / r;
        let q = ma / mb;
        ((var_a - 2.0 * q * cov + q * q * var_b) / (mb * mb)).max(0.0).sqrt()
    }
}

/// Running moments of the error `e = p_hat - p` over replicates.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorSums {
    pub count: u64,
    abs: RunningMoments,
    sq: RunningMoments,
    signed: RunningMoments,
}

impl ErrorSums {
    pub fn push(&mut self, e: f64) {
        self.count += 1;
        self.abs.push(e.abs());
        self.sq.push(e * e);
        self.signed.push(e);
    }

    pub fn merge(&mut self, other: &ErrorSums) {
        self.count += other.count;
        self.abs.merge(&other.abs);
        self.sq.merge(&other.sq);
        self.signed.merge(&other.signed);
    }

    pub fn mae(&self) -> f64 {
        self.abs.mean()
    }

    pub fn mse(&self) -> f64 {
        self.sq.mean()
    }

    pub fn bias(&self) -> f64 {
        self.signed.mean()
    }

    pub fn se_mae(&self) -> f64 {
        self.abs.stderr()
    }

    pub fn se_mse(&self) -> f64 {
        self.sq.stderr()
    }

    pub fn se_bias(&self) -> f64 {
        self.signed.stderr()
    }
}

/// One grid point of a risk curve. `se` is the standard error of `mae`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub distribution: String,
    pub transform: String,
    pub kind: EstimatorKind,
    pub n: usize,
    pub p: f64,
    pub mae: f64,
    pub mse: f64,
    pub bias: f64,
    pub se: f64,
    pub reps: u64,
    pub se_mse: f64,
    pub se_bias: f64,
}

impl CurvePoint {
    pub fn from_sums(distribution: String, transform: String, kind: EstimatorKind, n: usize, p: f64, s: &ErrorSums) -> Self {
        CurvePoint {
            distribution,
            transform,
            kind,
            n,
            p,
            mae: s.mae(),
            mse: s.mse(),
            bias: s.bias(),
            se: s.se_mae(),
            reps: s.count,
            se_mse: s.se_mse(),
            se_bias: s.se_bias(),
        }
    }
}

pub const CURVE_HEADER: [&str; 12] =
    ["distribution", "transform", "kind", "n", "p", "mae", "mse", "bias", "se", "reps", "se_mse", "se_bias"];

/// Simulated risk over a grid plus run diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RiskCurve {
    pub points: Vec<CurvePoint>,
    /// Replicates redrawn because a normal fit had zero spread.
    pub degenerate_fits: u64,
}

impl RiskCurve {
    pub fn find(&self, transform: &str, kind: EstimatorKind, n: usize, p: f64) -> Option<&CurvePoint> {
        self.points
            .iter()
            .find(|c| c.transform == transform && c.kind == kind && c.n == n && (c.p - p).abs() < 1e-12)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(CURVE_HEADER)?;
        for c in &self.points {
            w.write_record([
                c.distribution.clone(),
                c.transform.clone(),
                c.kind.to_string(),
                c.n.to_string(),
                c.p.to_string(),
                c.mae.to_string(),
                c.mse.to_string(),
                c.bias.to_string(),
                c.se.to_string(),
                c.reps.to_string(),
                c.se_mse.to_string(),
                c.se_bias.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Data(e.to_string()))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv(path: &Path) -> Result<RiskCurve> {
        let mut r = csv::Reader::from_path(path)?;
        let points = r.deserialize().collect::<std::result::Result<Vec<CurvePoint>, _>>()?;
        Ok(RiskCurve { points, degenerate_fits: 0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_give_moments_and_standard_errors() {
        let mut s = ErrorSums::default();
        for e in [-0.1, 0.2, 0.3, -0.4] {
            s.push(e);
        }
        assert!((s.mae() - 0.25).abs() < 1e-15);
        assert!((s.bias() - 0.0).abs() < 1e-15);
        assert!((s.mse() - 0.075).abs() < 1e-15);
        // sample sd of |e| = sd(0.1,0.2,0.3,0.4) = 0.129099..., divided by 2
        assert!((s.se_mae() - 0.129_099_444_873_580_56 / 2.0).abs() < 1e-12);
        let mut a = ErrorSums::default();
        let mut b = ErrorSums::default();
        a.push(-0.1);
        a.push(0.2);
        b.push(0.3);
        b.push(-0.4);
        a.merge(&b);
        assert_eq!(a.count, 4);
        assert!((a.mae() - s.mae()).abs() < 1e-15);
        assert!((a.se_mae() - s.se_mae()).abs() < 1e-15);
        let mut c = ErrorSums::default();
        for _ in 0..1000 {
            c.push(0.2);
        }
        assert_eq!((c.mae(), c.se_mae()), (0.2, 0.0));
    }

    #[test]
    fn paired_moments_merge_like_one_pass() {
        let data: Vec<(f64, f64)> = (0..40).map(|i| ((i as f64 * 0.37).sin() + 2.0, (i as f64 * 0.11).cos() + 3.0)).collect();
        let mut whole = PairedMoments::default();
        for &(a, b) in &data {
            whole.push(a, b);
        }
        let mut left = PairedMoments::default();
        let mut right = PairedMoments::default();
        for &(a, b) in &data[..13] {
            left.push(a, b);
        }
        for &(a, b) in &data[13..] {
            right.push(a, b);
        }
        left.merge(&right);
        assert!((left.ratio() - whole.ratio()).abs() < 1e-14);
        assert!((left.se_ratio() - whole.se_ratio()).abs() < 1e-14);
        // direct two-pass covariance
        let r = data.len() as f64;
        let ma = data.iter().map(|d| d.0).sum::<f64>() / r;
        let mb = data.iter().map(|d| d.1).sum::<f64>() / r;
        let cov = data.iter().map(|d| (d.0 - ma) * (d.1 - mb)).sum::<f64>();
        assert!((whole.cab - cov).abs() < 1e-12);
        // identical series: ratio 1 with no spread
        let mut same = PairedMoments::default();
        for &(a, _) in &data {
            same.push(a, a);
        }
        assert!((same.ratio() - 1.0).abs() < 1e-15 && same.se_ratio() < 1e-9);
    }

    #[test]
    fn csv_round_trip() {
        let mut s = ErrorSums::default();
        s.push(0.1);
        s.push(-0.3);
        let curve = RiskCurve {
            points: vec![CurvePoint::from_sums("uniform(0,1)".into(), "true_cdf".into(), EstimatorKind::B, 10, 0.5, &s)],
            degenerate_fits: 0,
        };
        let text = curve.to_csv_string().unwrap();
        assert!(text.starts_with("distribution,transform,kind,n,p,mae,mse,bias,se,reps,se_mse,se_bias\n"));
        assert!(text.contains("\"uniform(0,1)\""));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        curve.save_csv(&path).unwrap();
        assert_eq!(RiskCurve::read_csv(&path).unwrap(), curve);
    }
}
