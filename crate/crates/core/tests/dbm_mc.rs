use wigner::dbm::{dbm_path, qt_kernel};
use wigner::ensemble::sample_gue;
use wigner::matrix::HermitianMatrix;
use wigner::quad::composite;
use wigner::rng::derive_stream;
use wigner::spectral::eigenvalues;
use wigner::stats::{ks_two_sample, l1_distance};

#[test]
fn gaussian_increments_add() {
    let n = 50;
    let t = 0.4;
    let mut one = Vec::new();
    let mut two = Vec::new();
    for k in 0..500 {
        let h0: HermitianMatrix<f64> = sample_gue(n, &mut derive_stream(51, k));
        let a = dbm_path(&h0, &[0.0, t], &mut derive_stream(52, k)).unwrap();
        let b = dbm_path(&h0, &[0.0, t / 2.0, t], &mut derive_stream(53, k)).unwrap();
        one.extend_from_slice(a.spectra.last().unwrap());
        two.extend_from_slice(b.spectra.last().unwrap());
    }
    let d = ks_two_sample(&one, &two);
    assert!(d < 0.05, "KS {d}");
}

#[test]
fn two_level_kernel_normalizes_on_ordered_sector() {
    let y = [-1.0, 1.0];
    let t = 0.3;
    // inner variable substituted as x2 = x1 + s, s > 0
    let outer = composite(-6.0, 6.0, 120, 16);
    let inner = composite(0.0, 10.0, 100, 16);
    let mut total = 0.0;
    for &(x1, w1) in &outer {
        for &(s, w2) in &inner {
            total += w1 * w2 * qt_kernel(&[x1, x1 + s], &y, t).unwrap();
        }
    }
    assert!((total - 1.0).abs() < 1e-4, "{total}");
}

#[test]
fn three_level_kernel_normalizes_on_ordered_sector() {
    let y = [-1.0, 0.2, 1.1];
    let t = 0.5;
    let outer = composite(-6.0, 6.0, 40, 12);
    let gaps = composite(0.0, 7.0, 28, 12);
    let mut total = 0.0;
    for &(x1, w1) in &outer {
        for &(s, w2) in &gaps {
            for &(r, w3) in &gaps {
                total += w1 * w2 * w3 * qt_kernel(&[x1, x1 + s, x1 + s + r], &y, t).unwrap();
            }
        }
    }
    assert!((total - 1.0).abs() < 1e-4, "{total}");
}

#[test]
fn sampled_two_level_spectra_follow_the_kernel() {
    let y = [-1.0, 1.0];
    let t: f64 = 0.3;
    let (lo, hi, bins) = (-3.5, 3.5, 35);
    let h = (hi - lo) / bins as f64;
    let mut hist = vec![0.0; bins * bins];
    let draws = 100_000;
    let h0 = HermitianMatrix::diagonal(&y);
    for k in 0..draws {
        let v: HermitianMatrix<f64> = sample_gue(2, &mut derive_stream(54, k));
        let e = eigenvalues(&h0.add_scaled(&v, t.sqrt()).unwrap()).unwrap();
        if e[0] >= lo && e[1] < hi {
            let a = ((e[0] - lo) / h) as usize;
            let b = ((e[1] - lo) / h) as usize;
            hist[a * bins + b] += 1.0;
        }
    }
    let emp: Vec<f64> = hist.iter().map(|c| c / (draws as f64 * h * h)).collect();
    // cell averages of q_t by a 4x4 midpoint rule, zero below the diagonal
    let mut model = vec![0.0; bins * bins];
    let sub = 4;
    for a in 0..bins {
        for b in a..bins {
            let mut acc = 0.0;
            for i in 0..sub {
                for j in 0..sub {
                    let x1 = lo + (a as f64 + (i as f64 + 0.5) / sub as f64) * h;
                    let x2 = lo + (b as f64 + (j as f64 + 0.5) / sub as f64) * h;
                    if x1 < x2 {
                        acc += qt_kernel(&[x1, x2], &y, t).unwrap();
                    }
                }
            }
            model[a * bins + b] = acc / (sub * sub) as f64;
        }
    }
    let d = l1_distance(&emp, &model, h * h);
    assert!(d <= 0.05, "L1 {d}");
}
