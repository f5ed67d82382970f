mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_pcg::Pcg64;
use splitpoint::distributions::{ecdf_build, ecdf_eval, DistributionModel};

use DistributionModel::*;

fn families() -> Vec<DistributionModel> {
    vec![
        Uniform { a: -1.0, b: 2.0 },
        Beta { alpha: 0.5, beta: 0.5 },
        Beta { alpha: 2.0, beta: 2.0 },
        Beta { alpha: 10.0, beta: 10.0 },
        Beta { alpha: 2.0, beta: 10.0 },
        Beta { alpha: 10.0, beta: 2.0 },
        Beta { alpha: 1.0, beta: 3.0 },
        Normal { mu: 1.0, sigma: 2.0 },
        Cauchy { loc: 0.0, scale: 1.0 },
        Laplace { loc: 0.5, scale: 2.0 },
        ChiSquared { df: 1.0 },
        ChiSquared { df: 4.0 },
        Exponential { rate: 1.0 },
        LogNormal { mu: 0.0, sigma: 1.0 },
        NormalMixture { weight: 0.5, mu1: 0.0, sigma1: 1.0, mu2: 5.0, sigma2: 1.0 },
        NormalMixture { weight: 0.75, mu1: 0.0, sigma1: 1.0, mu2: 5.0, sigma2: 2.0 },
        BiTriangle { p: 0.3 },
        BiTriangle { p: 0.8 },
    ]
}

#[test]
fn density_integrates_to_one() {
    for d in families() {
        let (lo, hi) = d.support();
        // the effective support drops 1e-9 of tail mass on each unbounded side
        let a = if lo.is_finite() { lo } else { d.quantile(1e-9).unwrap() };
        let b = if hi.is_finite() { hi } else { d.quantile(1.0 - 1e-9).unwrap() };
        let mut breaks: Vec<f64> = [1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999, 1.0 - 1e-6]
            .iter()
            .map(|&u| d.quantile(u).unwrap())
            .collect();
        match d {
            BiTriangle { p } => breaks.push(p),
            Laplace { loc, .. } => breaks.push(loc),
            _ => {}
        }
        let mass = common::integrate(&|x| d.pdf(x).unwrap(), a, b, &breaks);
        assert!((mass - 1.0).abs() < 1e-4, "{d}: {mass}");
    }
}

#[test]
fn probability_integral_transform_is_uniform() {
    let n = 100_000;
    for (i, d) in families().into_iter().enumerate() {
        let xs = d.sample(&mut Pcg64::seed_from_u64(100 + i as u64), n).unwrap();
        let mut us: Vec<f64> = xs.iter().map(|&x| d.cdf(x).unwrap()).collect();
        us.sort_by(f64::total_cmp);
        let ks = us
            .iter()
            .enumerate()
            .map(|(k, &u)| ((k + 1) as f64 / n as f64 - u).max(u - k as f64 / n as f64))
            .fold(0.0, f64::max);
        assert!(ks <= 1.63 / (n as f64).sqrt(), "{d}: KS distance {ks}");
    }
}

#[test]
fn bitriangle_cdf_integrates_the_density() {
    for p in [0.2, 0.5, 0.7] {
        let d = BiTriangle { p };
        for x in [0.05, 0.2, 0.45, 0.6, 0.95] {
            let area = common::integrate(&|t| d.pdf(t).unwrap(), 0.0, x, &[p]);
            assert!((area - d.cdf(x).unwrap()).abs() < 1e-12, "p={p} x={x}");
        }
    }
}

#[test]
fn ecdf_hits_rank_over_n() {
    let xs = Normal { mu: 0.0, sigma: 1.0 }.sample(&mut Pcg64::seed_from_u64(1), 500).unwrap();
    let e = ecdf_build(&xs).unwrap();
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    for (k, x) in sorted.iter().enumerate() {
        assert_eq!(ecdf_eval(&e, *x), (k + 1) as f64 / 500.0);
    }
}

fn any_model() -> impl Strategy<Value = DistributionModel> {
    prop_oneof![
        (-5.0..5.0f64, 0.1..5.0f64).prop_map(|(a, w)| Uniform { a, b: a + w }),
        (0.2..20.0f64, 0.2..20.0f64).prop_map(|(alpha, beta)| Beta { alpha, beta }),
        (-5.0..5.0f64, 0.1..5.0f64).prop_map(|(mu, sigma)| Normal { mu, sigma }),
        (-5.0..5.0f64, 0.1..5.0f64).prop_map(|(loc, scale)| Cauchy { loc, scale }),
        (-5.0..5.0f64, 0.1..5.0f64).prop_map(|(loc, scale)| Laplace { loc, scale }),
        (0.5..30.0f64).prop_map(|df| ChiSquared { df }),
        (0.1..10.0f64).prop_map(|rate| Exponential { rate }),
        (-1.0..1.0f64, 0.1..1.5f64).prop_map(|(mu, sigma)| LogNormal { mu, sigma }),
        (0.05..0.95f64, -3.0..3.0f64, 0.2..3.0f64, 2.0..8.0f64, 0.2..3.0f64)
            .prop_map(|(weight, mu1, sigma1, mu2, sigma2)| NormalMixture { weight, mu1, sigma1, mu2, sigma2 }),
        (0.01..0.99f64).prop_map(|p| BiTriangle { p }),
    ]
}

proptest! {
    #[test]
    fn quantile_inverts_cdf(d in any_model(), u in 0.001..0.999f64) {
        let x = d.quantile(u).unwrap();
        let back = d.cdf(x).unwrap();
        prop_assert!((back - u).abs() <= 1e-9, "{} u={} back={}", d, u, back);
    }

    #[test]
    fn cdf_is_monotone(d in any_model(), a in 0.001..0.999f64, b in 0.001..0.999f64) {
        let (xa, xb) = (d.quantile(a.min(b)).unwrap(), d.quantile(a.max(b)).unwrap());
        prop_assert!(xa <= xb);
        prop_assert!(d.cdf(xa).unwrap() <= d.cdf(xb).unwrap());
        prop_assert!(d.pdf(xa).unwrap() >= 0.0);
    }

    #[test]
    fn ecdf_is_a_step_cdf(values in proptest::collection::vec(-100.0..100.0f64, 1..50), x in -150.0..150.0f64, dx in 0.0..10.0f64) {
        let e = ecdf_build(&values).unwrap();
        let (lo, hi) = (ecdf_eval(&e, x), ecdf_eval(&e, x + dx));
        prop_assert!((0.0..=1.0).contains(&lo) && lo <= hi);
    }
}
