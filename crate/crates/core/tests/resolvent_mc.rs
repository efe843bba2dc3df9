use statrs::distribution::{ContinuousCDF, Exp};
use wigner::ensemble::{sample_gue, sample_wigner, EnsembleSpec, EntryLaw};
use wigner::rng::derive_stream;
use wigner::spectral::{eigenvalues, principal_minor, resolvent_diag, schur_diag, SchurParts};
use wigner::stats::{ks_statistic, MeanEstimate};
use wigner::stieltjes::{interlacing_check, self_consistency_from_parts, UpperHalfPoint};
use wigner::{Complex64, Matrix};

#[test]
fn overlaps_are_exponential() {
    let h: Matrix = sample_gue(1000, &mut derive_stream(21, 0));
    let xi = SchurParts::new(&h, 0).unwrap().xi;
    let m = MeanEstimate::from_samples(&xi);
    assert!((m.mean - 1.0).abs() < 0.02, "mean xi {}", m.mean);
    let exp = Exp::new(1.0).unwrap();
    let d = ks_statistic(&xi, |x| exp.cdf(x));
    assert!(d < 0.05, "KS {d}");
}

#[test]
fn drift_and_fluctuation_terms() {
    let n = 1000;
    let h: Matrix = sample_gue(n, &mut derive_stream(22, 0));
    let eigs = eigenvalues(&h).unwrap();
    let z = UpperHalfPoint::new(0.0, 20.0 / n as f64).unwrap();
    let bound = 2.0 / (n as f64 * z.eta);
    let mut ys = Vec::new();
    for j in [0, 111, 250, 333, 500, 640, 777, 999] {
        let parts = SchurParts::new(&h, j).unwrap();
        let sc = self_consistency_from_parts(&eigs, &parts, &z);
        assert!(sc.minor_drift.norm() <= bound, "j={j}: {} > {bound}", sc.minor_drift.norm());
        ys.push(sc.y.re);
        ys.push(sc.y.im);
    }
    let re: Vec<f64> = ys.iter().step_by(2).copied().collect();
    let im: Vec<f64> = ys.iter().skip(1).step_by(2).copied().collect();
    for part in [re, im] {
        let m = MeanEstimate::from_samples(&part);
        assert!(m.mean.abs() <= 3.0 * m.stderr, "{m:?}");
    }
}

#[test]
fn minors_interlace_for_every_index() {
    let spec = EnsembleSpec::new(30, EntryLaw::rademacher(), 0.0, 23).unwrap();
    for k in 0..100 {
        let h = sample_wigner::<f64>(&spec, &mut derive_stream(23, k)).unwrap();
        let e = eigenvalues(&h).unwrap();
        for j in 0..30 {
            let b = eigenvalues(&principal_minor(&h, j).unwrap()).unwrap();
            assert!(interlacing_check(&e, &b).unwrap(), "matrix {k}, j {j}");
        }
    }
}

#[test]
fn direct_solve_and_schur_formula_agree() {
    let h: Matrix = sample_gue(50, &mut derive_stream(24, 0));
    let z = Complex64::new(0.3, 0.05);
    for j in 0..50 {
        let a = resolvent_diag(&h, z, j).unwrap();
        let b = schur_diag(&h, z, j).unwrap();
        assert!((a - b).norm() <= 1e-8 * a.norm(), "j={j}");
    }
}
