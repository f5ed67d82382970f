use proptest::prelude::*;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use splitpoint::distributions::{standard_normal_cdf, standard_normal_quantile};
use splitpoint::montecarlo::with_workers;
use splitpoint::supervised::{estimate, EstimatorKind, SufficientStat};
use splitpoint::tree::*;

fn split(x: &[f64], y: &[bool], rule: InterpolationRule) -> StumpModel {
    match fit_stump(x, y, rule).unwrap() {
        StumpFit::Split(s) => s,
        StumpFit::Constant(c) => panic!("constant {c}"),
    }
}

#[test]
fn midpoint_depends_on_the_scale() {
    let y = [true, true, false];
    let raw = split(&[1.0, 2.0, 10.0], &y, InterpolationRule::Midpoint);
    let sq = split(&[1.0, 4.0, 100.0], &y, InterpolationRule::Midpoint);
    assert_eq!(raw.threshold(), 6.0);
    assert_eq!(sq.threshold(), 52.0);
    // x = 7 is class 0 on the raw scale but class 1 on the squared scale
    assert!(!raw.predict(&[7.0]));
    assert!(sq.predict(&[49.0]));

    let raw = split(&[1.0, 4.0, 100.0], &y, InterpolationRule::Midpoint);
    let sq = split(&[1.0, 16.0, 10_000.0], &y, InterpolationRule::Midpoint);
    assert_eq!((raw.threshold(), sq.threshold()), (52.0, 5008.0));
    assert_eq!((raw.predict(&[8.0]), sq.predict(&[64.0])), (true, true));
    assert_eq!((raw.predict(&[60.0]), sq.predict(&[3600.0])), (false, true));
}

fn labeled_points() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    proptest::collection::vec((-3.0..3.0f64, any::<bool>()), 2..40).prop_map(|v| v.into_iter().unzip())
}

proptest! {
    #[test]
    fn training_predictions_ignore_rule_and_monotone_maps((x, y) in labeled_points()) {
        let fits: Vec<StumpFit> = [
            x.clone(),
            x.iter().map(|v| v * v * v).collect(),
            x.iter().map(|v| v.exp()).collect(),
        ]
        .iter()
        .flat_map(|xs| InterpolationRule::ALL.map(|r| fit_stump(xs, &y, r).unwrap()))
        .collect();
        let mapped = |j: usize, v: f64| match j / 3 { 0 => v, 1 => v * v * v, _ => v.exp() };
        let base: Vec<bool> = x.iter().map(|&v| fits[0].predict(v)).collect();
        for (j, f) in fits.iter().enumerate() {
            let pred: Vec<bool> = x.iter().map(|&v| f.predict(mapped(j, v))).collect();
            prop_assert_eq!(&pred, &base);
        }
    }

    #[test]
    fn separable_data_gets_zero_training_error(x in proptest::collection::vec(-10.0..10.0f64, 2..40), t in -10.0..10.0f64) {
        let y: Vec<bool> = x.iter().map(|&v| v <= t).collect();
        for rule in InterpolationRule::ALL {
            let fit = fit_stump(&x, &y, rule).unwrap();
            prop_assert!(x.iter().zip(&y).all(|(&v, &c)| fit.predict(v) == c));
        }
    }
}

#[test]
fn order_zero_tree_is_the_single_split_estimator() {
    let mut rng = Pcg64::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..300 {
        let n = rng.random_range(2..30);
        let u: Vec<f64> = (0..n).map(|_| rng.sample(Open01)).collect();
        let y: Vec<bool> = u.iter().map(|&v| splitting_set_label(0, v)).collect();
        let k = y.iter().filter(|&&b| b).count();
        if k == 0 || k == n {
            continue;
        }
        let x: Vec<f64> = u.iter().map(|&v| standard_normal_quantile(v)).collect();
        let l = u.iter().copied().filter(|&v| v < 0.5).fold(0.0, f64::max);
        let r = u.iter().copied().filter(|&v| v >= 0.5).fold(1.0, f64::min);
        let b = estimate(EstimatorKind::B, &SufficientStat::quantile(l, r, k, n).unwrap(), None).unwrap();
        let xs = 0.5 * (standard_normal_quantile(l) + standard_normal_quantile(r));
        let quant = fit_tree_1d(&u, &y, 2, InterpolationRule::Midpoint).unwrap();
        let raw = fit_tree_1d(&x, &y, 2, InterpolationRule::Midpoint).unwrap();
        assert!((splitting_set_error(&quant, 0, |v| v) - (b - 0.5).abs()).abs() < 1e-12);
        assert!((splitting_set_error(&raw, 0, standard_normal_cdf) - (standard_normal_cdf(xs) - 0.5).abs()).abs() < 1e-12);
        checked += 1;
    }
    assert!(checked > 250);
}

#[test]
fn tree_error_counts_every_grid_point_once() {
    let grid = CircleGrid::new(50);
    let mut rng = Pcg64::seed_from_u64(2);
    let u: [Vec<f64>; 2] = std::array::from_fn(|_| (0..200).map(|_| rng.sample(Open01)).collect());
    let y: Vec<bool> = (0..200).map(|i| inside_circle(u[0][i], u[1][i])).collect();
    let tree = fit_tree(&[&u[0], &u[1]], &y, TreeParams::new(8, InterpolationRule::Midpoint)).unwrap();
    let mut hits = vec![0u32; 2500];
    for leaf in tree.leaf_regions() {
        for (i, &a) in grid.unit.iter().enumerate() {
            for (j, &b) in grid.unit.iter().enumerate() {
                let inside = |(lo, hi): (f64, f64), v: f64| v > lo && v <= hi;
                if inside(leaf.bounds[0], a) && inside(leaf.bounds[1], b) {
                    hits[i * 50 + j] += 1;
                    assert_eq!(leaf.class, tree.predict(&[a, b]));
                }
            }
        }
    }
    assert!(hits.iter().all(|&h| h == 1));
    assert!(tree.depth() <= 8);
    assert_eq!(grid.error_rate(&tree, &grid.unit), grid.error_rate_brute_force(&tree, &grid.unit));
}

#[test]
fn splitting_sets_worker_invariant_and_ordered() {
    let cfg = SplitSetsConfig { orders: vec![0, 1, 2, 3], n: vec![20], reps: 1500, seed: 9, ..Default::default() };
    let one = with_workers(Some(1), || simulate_splitting_sets(&cfg)).unwrap().unwrap();
    let three = with_workers(Some(3), || simulate_splitting_sets(&cfg)).unwrap().unwrap();
    assert_eq!(one, three);
    let mae: Vec<f64> = (0..4).map(|k| one.find(k, 20).unwrap().mae_quantile).collect();
    assert!(mae.windows(2).all(|w| w[0] < w[1]), "{mae:?}");
    let mut buf = Vec::new();
    one.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("order,n,mae_raw,se_raw,mae_quantile,se_quantile,ratio,se_ratio,reps\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn circle_small_run_is_deterministic() {
    let cfg = CircleConfig { n: vec![20, 100], reps: 200, grid: 100, ..Default::default() };
    let a = simulate_circle(&cfg).unwrap();
    let b = with_workers(Some(2), || simulate_circle(&cfg)).unwrap().unwrap();
    assert_eq!(a, b);
    let (small, large) = (a.find(20).unwrap(), a.find(100).unwrap());
    assert!(large.mae_quantile < small.mae_quantile);
    assert!(small.mae_raw > 0.0 && small.mae_raw < 0.5);
    assert!(CircleConfig { grid: 0, ..Default::default() }.validate().is_err());
}
