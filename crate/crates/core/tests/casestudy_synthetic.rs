use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use splitpoint::casestudy::*;
use splitpoint::montecarlo::with_workers;

/// Skewed continuous values labeled positive above `cut`.
pub fn skewed_dataset(rows: usize, cut: f64, seed: u64) -> LabeledDataset {
    let mut rng = Pcg64::seed_from_u64(seed);
    let values: Vec<f64> = (0..rows).map(|_| -rng.random::<f64>().ln() * 2.0).collect();
    let labels = values.iter().map(|&v| v > cut).collect();
    LabeledDataset::new(values, labels).unwrap()
}

#[test]
fn every_scale_converges_to_the_cut() {
    let cut = 2.5;
    let data = skewed_dataset(20_000, cut, 4);
    let cfg = CaseStudyConfig { n: vec![10, 100, 2000], reps: 400, seed: 1, ..Default::default() };
    let report = resample_experiment(&data, &cfg).unwrap();
    for scale in CaseScale::ALL {
        let errs: Vec<f64> = cfg.n.iter().map(|&n| report.find(n).unwrap().get(scale).unwrap().error).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{scale}: {errs:?}");
        let last = report.find(2000).unwrap().get(scale).unwrap();
        assert!((last.mean_split - cut).abs() < 0.02, "{scale}: {}", last.mean_split);
        assert!(last.error < 5e-4);
    }
}

#[test]
fn quantile_midpoint_beats_raw_on_skewed_data() {
    let data = skewed_dataset(20_000, 2.5, 8);
    let cfg = CaseStudyConfig { n: vec![10, 20], reps: 4000, seed: 3, ..Default::default() };
    let report = resample_experiment(&data, &cfg).unwrap();
    for &n in &cfg.n {
        let row = report.find(n).unwrap();
        let (x, u) = (row.get(CaseScale::X).unwrap(), row.get(CaseScale::U).unwrap());
        assert!(u.error < x.error, "n={n}: U {} vs X {}", u.error, x.error);
    }
}

#[test]
fn resampling_is_deterministic_and_validated() {
    let data = skewed_dataset(3000, 1.0, 2);
    let cfg = CaseStudyConfig { n: vec![10, 50], reps: 700, seed: 5, ..Default::default() };
    let a = resample_experiment(&data, &cfg).unwrap();
    let b = with_workers(Some(3), || resample_experiment(&data, &cfg)).unwrap().unwrap();
    assert_eq!(a, b);
    let mut buf = Vec::new();
    a.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("n,split_X,split_U,split_L,split_R,error_X,error_U,error_L,error_R,"));
    let too_big = CaseStudyConfig { n: vec![5000], ..cfg };
    assert_eq!(resample_experiment(&data, &too_big).unwrap_err().exit_code(), 2);
}
