mod common;

use common::{su_expectation, su_expectation_smooth};
use splitpoint::risk::{completeness_witness, rb_variance_real_n, risk, Measure, RiskQuery, RiskValue};
use splitpoint::supervised::{estimate, EstimatorKind, SufficientStat};

use EstimatorKind::*;

fn closed(kind: EstimatorKind, n: usize, p: f64, measure: Measure) -> RiskValue {
    risk(&RiskQuery { kind, n, p, measure }).unwrap()
}

/// Estimator as a function of (l, r) with the class count implied by the
/// region: l = 0 means no class-1 points, r = 1 means no class-0 points.
fn estimator(kind: EstimatorKind, n: usize) -> impl Fn(f64, f64) -> f64 {
    move |l, r| {
        let k = if l == 0.0 {
            0
        } else if r == 1.0 {
            n
        } else {
            1
        };
        let stat = SufficientStat { l, r, k, n, lo: 0.0, hi: 1.0 };
        estimate(kind, &stat, None).unwrap()
    }
}

const NS: [usize; 3] = [2, 5, 10];
const PS: [f64; 3] = [0.1, 0.5, 0.8];

#[test]
fn mean_and_mse_match_quadrature() {
    for kind in [L, R, B, RB, SL, SR, SB] {
        for n in NS {
            for p in PS {
                let est = estimator(kind, n);
                let mean = su_expectation_smooth(n, p, &|l, r| est(l, r));
                let mse = su_expectation_smooth(n, p, &|l, r| (est(l, r) - p).powi(2));
                let second = su_expectation_smooth(n, p, &|l, r| est(l, r).powi(2));
                let want_mean = closed(kind, n, p, Measure::Mean).value().unwrap();
                let want_mse = closed(kind, n, p, Measure::Mse).value().unwrap();
                let want_var = closed(kind, n, p, Measure::Variance).value().unwrap();
                assert!((mean - want_mean).abs() < 1e-6, "{kind} n={n} p={p} mean {mean} vs {want_mean}");
                assert!((mse - want_mse).abs() < 1e-6, "{kind} n={n} p={p} mse {mse} vs {want_mse}");
                let var = second - mean * mean;
                assert!((var - want_var).abs() < 1e-6, "{kind} n={n} p={p} var {var} vs {want_var}");
            }
        }
    }
}

#[test]
fn mae_matches_quadrature_where_closed_form_exists() {
    for n in NS {
        for p in PS {
            let l = su_expectation_smooth(n, p, &|l, r| (estimator(L, n)(l, r) - p).abs());
            let r = su_expectation_smooth(n, p, &|l, r| (estimator(R, n)(l, r) - p).abs());
            let b_est = estimator(B, n);
            let b = su_expectation(
                n,
                p,
                &|l, r| (b_est(l, r) - p).abs(),
                &|l| vec![2.0 * p - l],
                &[2.0 * p - 1.0],
            );
            for (kind, got) in [(L, l), (R, r), (B, b)] {
                let want = closed(kind, n, p, Measure::Mae).value().unwrap();
                assert!((got - want).abs() < 1e-6, "{kind} n={n} p={p} mae {got} vs {want}");
            }
            for kind in [RB, SL, SR, SB] {
                assert_eq!(closed(kind, n, p, Measure::Mae), RiskValue::NotAnalytic);
            }
        }
    }
}

#[test]
fn n_equals_one_matches_quadrature() {
    for p in PS {
        for kind in [L, R, B, RB, SL, SR, SB] {
            let est = estimator(kind, 1);
            let mse = su_expectation_smooth(1, p, &|l, r| (est(l, r) - p).powi(2));
            let want = closed(kind, 1, p, Measure::Mse).value().unwrap();
            assert!((mse - want).abs() < 1e-9, "{kind} p={p}: {mse} vs {want}");
        }
    }
}

#[test]
fn rb_variance_at_three_is_continuous() {
    for p in [0.1, 0.3, 0.5, 0.8] {
        let at3 = closed(RB, 3, p, Measure::Variance).value().unwrap();
        let below = rb_variance_real_n(3.0 - 1e-6, p);
        let above = rb_variance_real_n(3.0 + 1e-6, p);
        assert!((below - at3).abs() < 1e-3 && (above - at3).abs() < 1e-3, "p={p}");
        let est = estimator(RB, 3);
        let quad = su_expectation_smooth(3, p, &|l, r| (est(l, r) - p).powi(2));
        assert!((quad - at3).abs() < 1e-8, "p={p}: {quad} vs {at3}");
    }
}

#[test]
fn witness_is_unbiased_for_zero() {
    for i in 1..10 {
        let p = i as f64 / 10.0;
        let e = su_expectation_smooth(2, p, &|l, r| completeness_witness(l, r).unwrap());
        assert!(e.abs() < 1e-8, "p={p}: {e}");
    }
}

#[test]
fn proportion_mae_matches_de_moivre() {
    fn ln_choose(n: u64, k: u64) -> f64 {
        (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
    }
    for n in [1u64, 2, 5, 10, 37, 100] {
        for p in [0.05, 0.3, 0.5, 0.77] {
            let nu = (n as f64 * p).floor() as u64 + 1;
            let de_moivre = if nu > n {
                0.0
            } else {
                2.0 * nu as f64
                    * (ln_choose(n, nu) + nu as f64 * p.ln() + (n - nu + 1) as f64 * (1.0 - p).ln()).exp()
            } / n as f64;
            let got = closed(Y, n as usize, p, Measure::Mae).value().unwrap();
            assert!((got - de_moivre).abs() < 1e-12, "n={n} p={p}: {got} vs {de_moivre}");
        }
    }
}
