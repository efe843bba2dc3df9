use wigner::ensemble::sample_gue;
use wigner::localstats::{
    iid_semicircle_spectrum, observable_statistic, pair_correlation, rescale_near, Observable, ObservableKind,
    DEFAULT_MAX_DISTANCE,
};
use wigner::mc::Runner;
use wigner::spectral::eigenvalues;
use wigner::stats::MeanEstimate;

fn gue_spectra(n: usize, reps: usize, seed: u64) -> Vec<Vec<f64>> {
    Runner::new(seed, 1)
        .run(reps, |_, s| eigenvalues(&sample_gue::<f64>(n, s)))
        .unwrap()
}

#[test]
fn bulk_statistics_of_gue_1000() {
    let n = 1000;
    let spectra = gue_spectra(n, 100, 41);

    let gaps: Vec<f64> = spectra
        .iter()
        .map(|e| {
            let x = rescale_near(e, 0.0, n, 100.0).unwrap();
            (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64
        })
        .collect();
    let g = MeanEstimate::from_samples(&gaps).mean;
    assert!((g - 1.0).abs() < 0.05, "mean gap {g}");

    let kappa = 2.0;
    let one = Observable::new(ObservableKind::Indicator { half_width: kappa / 2.0 }, 1).unwrap();
    let m = observable_statistic(&spectra, 0.0, 0.1, &one, n).unwrap();
    assert!((m.mean - kappa).abs() < 0.05 * kappa, "{m:?}");

    let two = Observable::new(ObservableKind::Indicator { half_width: 0.75 }, 2).unwrap();
    let m = observable_statistic(&spectra, 0.0, 0.1, &two, n).unwrap();
    let reference = two.sine_reference();
    assert!((m.mean - reference).abs() < 0.05, "{} vs {reference}", m.mean);

    let zero = Observable::zero(2).unwrap();
    assert_eq!(observable_statistic(&spectra, 0.0, 0.1, &zero, n).unwrap().mean, 0.0);
}

#[test]
fn independent_points_fail_the_sine_test() {
    let n = 1000;
    let w = 100.0;
    let unfolded = Runner::new(42, 1)
        .run(300, |_, s| rescale_near(&iid_semicircle_spectrum(n, s), 0.0, n, w))
        .unwrap();
    let est = pair_correlation(&unfolded, w, 0.1, DEFAULT_MAX_DISTANCE, 0.0).unwrap();
    assert!(est.max_sine_deviation(0.1, 2.5) > 0.05);
    assert!(est.max_flat_deviation(0.1, 2.5) < 0.1);
}
