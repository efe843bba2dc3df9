use wigner::ensemble::sample_gue;
use wigner::jkernel::{k_tn, k_tn_unchecked, rho_t, sine_limit_report, symmetric_normalized, ContourParams, KernelQuery};
use wigner::matrix::HermitianMatrix;
use wigner::rng::derive_stream;
use wigner::semicircle::semicircle_quantiles;
use wigner::spectral::eigenvalues;
use wigner::stats::{l1_distance, Histogram};

/// `K(x, x)` in unscaled coordinates, with the contours moved off the diagonal point.
fn diagonal(x: f64, e: f64, t: f64, y: &[f64], base: &ContourParams) -> f64 {
    let p = ContourParams {
        kappa: x + 0.0137,
        r: x,
        ..*base
    };
    let q = KernelQuery::new(x, x, e, t, y.to_vec(), rho_t(e, t)).unwrap();
    k_tn(&q, &p).unwrap().raw.re
}

#[test]
fn diagonal_integrates_to_n() {
    let (n, t) = (20, 0.5);
    let y = semicircle_quantiles(n);
    let base = ContourParams::defaults(0.0, t, n);
    let m = 600;
    let h = 6.0 / m as f64;
    let mass: f64 = (0..m)
        .map(|i| h * diagonal(-3.0 + (i as f64 + 0.5) * h, 0.0, t, &y, &base))
        .sum();
    assert!((mass / n as f64 - 1.0).abs() < 1e-2, "{}", mass / n as f64);
}

#[test]
fn doubling_nodes_stays_within_the_estimate() {
    let t = 0.5;
    let y = semicircle_quantiles(40);
    let p = ContourParams::defaults(0.1, t, 40);
    let fine = ContourParams { nodes: 2 * p.nodes, ..p };
    let pairs = [
        (0.0, 0.3),
        (0.0, 1.0),
        (0.2, 1.7),
        (-1.0, 1.0),
        (-0.5, 0.25),
        (0.7, 2.9),
        (-2.0, 0.0),
        (1.3, 1.9),
        (-0.1, 0.6),
        (0.45, -1.45),
    ];
    for (a, b) in pairs {
        let q = KernelQuery::rescaled(0.1, t, y.clone(), a, b).unwrap();
        let k1 = k_tn_unchecked(&q, &p).unwrap();
        let k2 = k_tn_unchecked(&q, &fine).unwrap();
        let diff = (k1.normalized - k2.normalized).norm();
        assert!(diff <= k1.error_estimate.max(1e-12), "({a}, {b}): {diff} > {}", k1.error_estimate);
    }
}

#[test]
fn shifting_r_leaves_the_gauge_invariant_value() {
    let (e, t) = (0.0, 0.5);
    let y = semicircle_quantiles(30);
    let p = ContourParams::defaults(e, t, 30);
    let shifted = ContourParams { r: e + 0.5, ..p };
    for x2 in [0.25, 0.5, 1.25, 2.0] {
        let a = symmetric_normalized(e, t, &y, 0.0, x2, &p).unwrap();
        let b = symmetric_normalized(e, t, &y, 0.0, x2, &shifted).unwrap();
        assert!((a.normalized - b.normalized).abs() < 1e-3, "{x2}: {} vs {}", a.normalized, b.normalized);
    }
}

#[test]
fn gauge_invariant_value_is_symmetric() {
    let t = 0.5;
    let y = semicircle_quantiles(30);
    let p = ContourParams::defaults(0.0, t, 30);
    for (a, b) in [(0.0, 0.8), (-0.4, 1.1)] {
        let s = symmetric_normalized(0.0, t, &y, a, b, &p).unwrap();
        let r = symmetric_normalized(0.0, t, &y, b, a, &p).unwrap();
        assert!((s.normalized - r.normalized).abs() < 1e-9);
    }
}

#[test]
fn two_level_density_matches_sampling() {
    let y = [-0.6, 0.9];
    let t: f64 = 0.4;
    let (lo, hi, bins) = (-3.0, 3.0, 60);
    let mut hist = Histogram::new(lo, hi, bins);
    let h0 = HermitianMatrix::diagonal(&y);
    let draws = 100_000;
    for k in 0..draws {
        let v: HermitianMatrix<f64> = sample_gue(2, &mut derive_stream(61, k));
        for x in eigenvalues(&h0.add_scaled(&v, t.sqrt()).unwrap()).unwrap() {
            hist.add(x);
        }
    }
    let base = ContourParams::defaults(0.0, t, 2);
    let emp = hist.density();
    // bin averages by Simpson's rule on each cell
    let model: Vec<f64> = (0..bins)
        .map(|b| {
            let c = hist.center(b);
            let w = hist.width() / 2.0;
            let f = |x: f64| diagonal(x, 0.0, t, &y, &base) / 2.0;
            (f(c - w) + 4.0 * f(c) + f(c + w)) / 6.0
        })
        .collect();
    let d = l1_distance(&emp, &model, hist.width());
    assert!(d < 0.02, "L1 {d}");
}

#[test]
fn sine_limit_vanishes_at_integer_gaps() {
    let t = 0.5;
    let y = semicircle_quantiles(50);
    let p = ContourParams::defaults(0.0, t, 50);
    let pairs: Vec<(f64, f64)> = (0..=8).map(|k| (0.0, k as f64 * 0.25)).collect();
    let rows = sine_limit_report(0.0, t, &y, &pairs, &p).unwrap();
    for r in &rows {
        assert!(r.abs_err <= 0.05, "{r:?}");
    }
    assert!((rows[0].normalized - 1.0).abs() <= 0.05);
    for r in rows.iter().filter(|r| r.x2.fract() == 0.0 && r.x2 > 0.0) {
        assert!(r.normalized.abs() <= 0.05, "{r:?}");
    }
}
