use splitpoint::distributions::DistributionModel;
use splitpoint::montecarlo::*;
use splitpoint::supervised::EstimatorKind::{self, *};

fn grid(kinds: Vec<EstimatorKind>, reps: usize) -> ExperimentConfig {
    ExperimentConfig {
        distributions: vec![DistributionModel::STANDARD_UNIFORM],
        p: vec![0.1, 0.5, 0.9],
        n: vec![5, 20],
        kinds,
        transforms: vec![Transform::TrueCdf],
        reps,
        seed: 11,
        ..Default::default()
    }
}

#[test]
fn workers_do_not_change_results() {
    let cfg = grid(vec![L, R, B, RB, SB], 1500);
    let one = with_workers(Some(1), || simulate_risk(&cfg)).unwrap().unwrap();
    let three = with_workers(Some(3), || simulate_risk(&cfg)).unwrap().unwrap();
    assert_eq!(one.to_csv_string().unwrap(), three.to_csv_string().unwrap());
}

#[test]
fn seeds_change_results() {
    let a = simulate_risk(&grid(vec![B], 500)).unwrap();
    let b = simulate_risk(&ExperimentConfig { seed: 12, ..grid(vec![B], 500) }).unwrap();
    assert_ne!(a.points[0].mae, b.points[0].mae);
}

#[test]
fn rao_blackwell_improves_on_the_proportion() {
    let c = simulate_risk(&grid(vec![Y, RB], 4000)).unwrap();
    for pt in c.points.iter().filter(|pt| pt.kind == RB) {
        let y = c.find("true_cdf", Y, pt.n, pt.p).unwrap();
        assert!(pt.mse <= y.mse, "n={} p={}: RB {} vs Y {}", pt.n, pt.p, pt.mse, y.mse);
        assert!(pt.bias.abs() <= 4.0 * pt.se_bias);
    }
}

#[test]
fn midpoint_beats_one_sided_estimators_at_the_center() {
    let c = simulate_risk(&grid(vec![L, R, B], 4000)).unwrap();
    for n in [5, 20] {
        let b = c.find("true_cdf", B, n, 0.5).unwrap().mae;
        assert!(b < c.find("true_cdf", L, n, 0.5).unwrap().mae);
        assert!(b < c.find("true_cdf", R, n, 0.5).unwrap().mae);
    }
}

#[test]
fn quantile_scale_is_distribution_free() {
    let base = grid(vec![B], 800);
    let u = simulate_risk(&base).unwrap();
    let beta = ExperimentConfig { distributions: vec!["beta(2,10)".parse().unwrap()], ..base };
    let b = simulate_risk(&beta).unwrap();
    for (x, y) in u.points.iter().zip(&b.points) {
        assert!((x.mae - y.mae).abs() < 1e-12, "{} vs {}", x.mae, y.mae);
    }
}
