//! Semicircle law, eigenvalue counting and density-of-states estimators.
//!
//! The density is normalized to unit mass, `rho(E) = sqrt(4 - E^2) / (2 pi)`,
//! which is the boundary value `Im m_sc(E + i0) / pi` of the semicircle
//! Stieltjes transform.

use serde::Serialize;

use crate::ensemble::{sample_wigner, EnsembleSpec};
use crate::error::{Error, Result};
use crate::mc::Runner;
use crate::scalar::Real;
use crate::spectral::eigenvalues;
use crate::stats::{wilson_interval, MeanEstimate};
use crate::stieltjes::{m_n, UpperHalfPoint};

/// Semicircle density on `[-2, 2]`.
pub fn rho_sc<T: Real>(e: T) -> T {
    let two = T::lit(2.0);
    if e.abs() > two {
        return T::zero();
    }
    (T::one() - e * e / T::lit(4.0)).max(T::zero()).sqrt() / T::PI()
}

/// Distribution function of the semicircle law.
pub fn semicircle_cdf<T: Real>(e: T) -> T {
    let two = T::lit(2.0);
    if e <= -two {
        return T::zero();
    }
    if e >= two {
        return T::one();
    }
    let half = T::lit(0.5);
    half + e * (T::lit(4.0) - e * e).sqrt() / (T::lit(4.0) * T::PI()) + (e / two).asin() / T::PI()
}

/// Inverse of [`semicircle_cdf`] on `[0, 1]`, by bisection.
pub fn semicircle_quantile<T: Real>(p: T) -> T {
    let (mut lo, mut hi) = (T::lit(-2.0), T::lit(2.0));
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if semicircle_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * T::lit(4.0) {
            break;
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// `N` points at the semicircle quantiles `(j + 1/2) / N`.
pub fn semicircle_quantiles<T: Real>(n: usize) -> Vec<T> {
    (0..n)
        .map(|j| {
            semicircle_quantile((T::from_usize_lossy(j) + T::lit(0.5)) / T::from_usize_lossy(n))
        })
        .collect()
}

/// Number of sorted eigenvalues in the closed interval `[a, b]`.
pub fn count_eigenvalues<T: Real>(eigs: &[T], a: T, b: T) -> Result<usize> {
    if a > b {
        return Err(Error::Argument(format!("empty interval [{a}, {b}]")));
    }
    let lo = eigs.partition_point(|&x| x < a);
    let hi = eigs.partition_point(|&x| x <= b);
    Ok(hi - lo)
}

/// How the width of an energy window is specified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum WindowScale {
    /// Width `eta`.
    Absolute(f64),
    /// Width `K / N`: about `K rho` eigenvalues.
    Microscopic(f64),
    /// Width `eps / N` with `eps` possibly tiny.
    Vanishing(f64),
}

impl WindowScale {
    pub fn kind(&self) -> &'static str {
        match self {
            WindowScale::Absolute(_) => "absolute-eta",
            WindowScale::Microscopic(_) => "microscopic-K",
            WindowScale::Vanishing(_) => "vanishing-eps",
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            WindowScale::Absolute(v) | WindowScale::Microscopic(v) | WindowScale::Vanishing(v) => v,
        }
    }
}

/// Window centered at `center` with the given scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyWindow {
    pub center: f64,
    pub scale: WindowScale,
}

impl EnergyWindow {
    pub fn absolute(center: f64, eta: f64) -> Self {
        Self {
            center,
            scale: WindowScale::Absolute(eta),
        }
    }

    pub fn microscopic(center: f64, k: f64) -> Self {
        Self {
            center,
            scale: WindowScale::Microscopic(k),
        }
    }

    pub fn vanishing(center: f64, eps: f64) -> Self {
        Self {
            center,
            scale: WindowScale::Vanishing(eps),
        }
    }

    fn check(&self) -> Result<()> {
        let v = self.scale.value();
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Argument(format!(
                "window scale must be positive, got {v}"
            )));
        }
        Ok(())
    }

    /// Width of the window in energy units.
    pub fn width(&self, n: usize) -> f64 {
        match self.scale {
            WindowScale::Absolute(eta) => eta,
            WindowScale::Microscopic(v) | WindowScale::Vanishing(v) => v / n as f64,
        }
    }

    pub fn bounds(&self, n: usize) -> (f64, f64) {
        let h = self.width(n) / 2.0;
        (self.center - h, self.center + h)
    }
}

/// Eigenvalue count in the window divided by `N * width` (equivalently by
/// `K` or `eps` for the rescaled windows).
pub fn dos_estimate<T: Real>(eigs: &[T], window: &EnergyWindow, n: usize) -> Result<f64> {
    window.check()?;
    let (a, b) = window.bounds(n);
    let count = count_eigenvalues(eigs, T::lit(a), T::lit(b))? as f64;
    Ok(match window.scale {
        WindowScale::Absolute(eta) => count / (n as f64 * eta),
        WindowScale::Microscopic(k) => count / k,
        WindowScale::Vanishing(eps) => count / eps,
    })
}

/// Per-realization density estimates, in realization order.
pub fn dos_samples<T: Real>(
    spec: &EnsembleSpec,
    window: &EnergyWindow,
    reps: usize,
    runner: &Runner,
) -> Result<Vec<f64>> {
    window.check()?;
    runner.run(reps, |_, s| {
        let h = sample_wigner::<T>(spec, s)?;
        dos_estimate(&eigenvalues(&h)?, window, spec.n)
    })
}

/// Empirical tail probability with a 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailProbability {
    pub probability: f64,
    pub hits: usize,
    pub reps: usize,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Fraction of `estimates` with `|x - target| >= delta`.
pub fn deviation_fraction(estimates: &[f64], target: f64, delta: f64) -> TailProbability {
    let hits = estimates
        .iter()
        .filter(|&&x| (x - target).abs() >= delta)
        .count();
    let reps = estimates.len();
    let (wilson_low, wilson_high) = wilson_interval(hits, reps, 1.96);
    TailProbability {
        probability: if reps > 0 { hits as f64 / reps as f64 } else { 0.0 },
        hits,
        reps,
        wilson_low,
        wilson_high,
    }
}

/// Probability that the window estimate deviates from `rho_sc(E)` by at
/// least `delta`.
pub fn deviation_probability<T: Real>(
    spec: &EnsembleSpec,
    window: &EnergyWindow,
    delta: f64,
    reps: usize,
    runner: &Runner,
) -> Result<TailProbability> {
    if reps == 0 {
        return Err(Error::Argument("reps must be at least 1".into()));
    }
    let xs = dos_samples::<T>(spec, window, reps, runner)?;
    Ok(deviation_fraction(&xs, rho_sc(window.center), delta))
}

/// Arctangent-smoothed count,
/// `(1/(pi kappa)) sum_a [atan(N(mu_a - E - kappa/2N)/eps) - atan(N(mu_a - E + kappa/2N)/eps)]`
/// taken with the sign that makes it positive. Equals
/// `(N / (pi kappa)) * integral of Im m_N(E' + i eps/N)` over the window and
/// tends to the count divided by `kappa` as `eps -> 0`.
pub fn smoothed_count<T: Real>(eigs: &[T], e: T, kappa: T, eps: T, n: usize) -> Result<T> {
    if !(kappa > T::zero()) || !(eps > T::zero()) {
        return Err(Error::Argument("kappa and eps must be positive".into()));
    }
    let nf = T::from_usize_lossy(n);
    let half = kappa / (T::lit(2.0) * nf);
    let sum: T = eigs
        .iter()
        .map(|&mu| {
            // atan(N(E + h - mu)/eps) - atan(N(E - h - mu)/eps) >= 0
            (nf * (e + half - mu) / eps).atan() - (nf * (e - half - mu) / eps).atan()
        })
        .sum();
    Ok(sum / (T::PI() * kappa))
}

/// Monte Carlo mean of `Im m_N(E + i eps/N) / pi`.
pub fn avg_dos_estimate<T: Real>(
    spec: &EnsembleSpec,
    e: f64,
    eps: f64,
    reps: usize,
    runner: &Runner,
) -> Result<MeanEstimate> {
    Ok(avg_dos_grid::<T>(spec, &[e], &[eps], reps, runner)?[0][0])
}

/// The average density of states for every `(E, eps)` pair, all evaluated on
/// the same realizations. Indexed `[energy][eps]`.
pub fn avg_dos_grid<T: Real>(
    spec: &EnsembleSpec,
    energies: &[f64],
    epsilons: &[f64],
    reps: usize,
    runner: &Runner,
) -> Result<Vec<Vec<MeanEstimate>>> {
    if reps == 0 {
        return Err(Error::Argument("reps must be at least 1".into()));
    }
    if epsilons.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Argument("eps must be positive".into()));
    }
    let n = spec.n as f64;
    let per_rep = runner.run(reps, |_, s| {
        let h = sample_wigner::<T>(spec, s)?;
        let eigs = eigenvalues(&h)?;
        let mut out = Vec::with_capacity(energies.len() * epsilons.len());
        for &e in energies {
            for &eps in epsilons {
                let z = UpperHalfPoint::new(T::lit(e), T::lit(eps / n))?;
                out.push(m_n(&eigs, &z).im.as_f64() / std::f64::consts::PI);
            }
        }
        Ok(out)
    })?;
    Ok((0..energies.len())
        .map(|i| {
            (0..epsilons.len())
                .map(|j| {
                    let k = i * epsilons.len() + j;
                    let xs: Vec<f64> = per_rep.iter().map(|r| r[k]).collect();
                    MeanEstimate::from_samples(&xs)
                })
                .collect()
        })
        .collect())
}

/// Central finite difference in `E` of `E Im m_N(E + i eps/N)` averaged over
/// realizations (step `h`). Exposed as a probe; no bound is asserted.
pub fn avg_dos_slope<T: Real>(
    spec: &EnsembleSpec,
    e: f64,
    eps: f64,
    h: f64,
    reps: usize,
    runner: &Runner,
) -> Result<MeanEstimate> {
    if !(h > 0.0) {
        return Err(Error::Argument("step must be positive".into()));
    }
    let n = spec.n as f64;
    let xs = runner.run(reps, |_, s| {
        let eigs = eigenvalues(&sample_wigner::<T>(spec, s)?)?;
        let at = |x: f64| -> Result<f64> {
            let z = UpperHalfPoint::new(T::lit(x), T::lit(eps / n))?;
            Ok(m_n(&eigs, &z).im.as_f64())
        };
        Ok((at(e + h)? - at(e - h)?) / (2.0 * h))
    })?;
    Ok(MeanEstimate::from_samples(&xs))
}

/// One bin of a macroscopic density histogram.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityBin {
    pub center: f64,
    pub estimate: f64,
    /// Semicircle mass of the bin divided by its width.
    pub expected: f64,
}

/// `bins` equal bins on `[lo, hi]`: count / (N width) against the averaged
/// semicircle density.
pub fn density_histogram<T: Real>(eigs: &[T], lo: f64, hi: f64, bins: usize) -> Result<Vec<DensityBin>> {
    if !(hi > lo) || bins == 0 {
        return Err(Error::Argument("need hi > lo and at least one bin".into()));
    }
    let n = eigs.len();
    let w = (hi - lo) / bins as f64;
    (0..bins)
        .map(|b| {
            let a = lo + b as f64 * w;
            let c = a + w;
            // half-open bins so every eigenvalue is counted once
            let count = eigs.partition_point(|&x| x.as_f64() < c) - eigs.partition_point(|&x| x.as_f64() < a);
            Ok(DensityBin {
                center: a + w / 2.0,
                estimate: count as f64 / (n as f64 * w),
                expected: (semicircle_cdf(c) - semicircle_cdf(a)) / w,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stieltjes::m_sc;

    #[test]
    fn rho_values() {
        assert_eq!(rho_sc(2.0f64), 0.0);
        assert_eq!(rho_sc(-2.5f64), 0.0);
        assert!((rho_sc(0.0f64) - std::f64::consts::FRAC_1_PI).abs() < 1e-15);
        assert!((rho_sc(1.0f64) - 3f64.sqrt() / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    }

    #[test]
    fn rho_is_boundary_value_of_m_sc() {
        // independent route: Im m_sc(E + i0) / pi from the quadratic
        for e in [0.0, 0.5, -0.5, 1.0, -1.0, 1.5, -1.5] {
            let z = UpperHalfPoint::new(e, 1e-8).unwrap();
            let lhs = std::f64::consts::PI * rho_sc(e);
            assert!((lhs - m_sc(&z).im).abs() < 1e-4, "E={e}");
        }
    }

    #[test]
    fn rho_integrates_to_one() {
        // Gauss-Chebyshev of the second kind is exact here: with E = 2 cos th,
        // integral = (2/pi) int_0^pi sin^2 th dth.
        let m = 64;
        let mut s = 0.0;
        for k in 1..=m {
            let th = k as f64 * std::f64::consts::PI / (m + 1) as f64;
            let e = 2.0 * th.cos();
            // dE = 2 sin th dth
            s += rho_sc(e) * 2.0 * th.sin() * std::f64::consts::PI / (m + 1) as f64;
        }
        assert!((s - 1.0).abs() < 1e-8, "{s}");
        // composite Simpson against the closed form as a second route
        let steps = 200_000;
        let h = 4.0 / steps as f64;
        let mut acc = rho_sc(-2.0) + rho_sc(2.0);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * rho_sc(-2.0 + i as f64 * h);
        }
        let simpson = acc * h / 3.0;
        assert!((simpson - 1.0).abs() < 1e-6);
        assert!((semicircle_cdf(2.0f64) - 1.0).abs() < 1e-15);
        assert!((semicircle_cdf(0.0f64) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quantiles_invert_cdf() {
        for p in [0.01, 0.25, 0.5, 0.9] {
            let q: f64 = semicircle_quantile(p);
            assert!((semicircle_cdf(q) - p).abs() < 1e-12);
        }
        let qs: Vec<f64> = semicircle_quantiles(5);
        assert!(qs.windows(2).all(|w| w[0] < w[1]));
        assert!((qs[2]).abs() < 1e-12);
    }

    #[test]
    fn counting() {
        let eigs = [-1.0, 0.0, 1.0];
        assert_eq!(count_eigenvalues(&eigs, -0.5, 0.5).unwrap(), 1);
        assert_eq!(count_eigenvalues(&eigs, 0.1, 0.1).unwrap(), 0);
        assert_eq!(count_eigenvalues(&eigs, -5.0, 5.0).unwrap(), 3);
        assert_eq!(count_eigenvalues(&eigs, 1.0, 1.0).unwrap(), 1);
        assert!(count_eigenvalues(&eigs, 1.0, 0.0).is_err());
    }

    #[test]
    fn dos_estimate_scales_agree() {
        let eigs = [-0.5, 0.0, 0.5];
        let a = dos_estimate(&eigs, &EnergyWindow::absolute(0.0, 1.2), 3).unwrap();
        assert!((a - 3.0 / 3.6).abs() < 1e-15);
        let b = dos_estimate(&eigs, &EnergyWindow::microscopic(0.0, 3.6), 3).unwrap();
        let c = dos_estimate(&eigs, &EnergyWindow::vanishing(0.0, 3.6), 3).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!((a - c).abs() < 1e-15);
        assert!(dos_estimate(&eigs, &EnergyWindow::absolute(0.0, 0.0), 3).is_err());
    }

    #[test]
    fn deviation_fraction_edge_cases() {
        let xs = [0.2, 0.3, 0.35, 0.5];
        assert_eq!(deviation_fraction(&xs, 0.3, 0.0).probability, 1.0);
        assert_eq!(deviation_fraction(&xs, 0.3, 10.0).probability, 0.0);
        let mut last = 1.0;
        for d in [0.0, 0.01, 0.05, 0.1, 0.2, 0.3] {
            let p = deviation_fraction(&xs, 0.3, d).probability;
            assert!(p <= last);
            last = p;
        }
    }

    #[test]
    fn smoothed_count_limits() {
        // one eigenvalue at E
        let s: f64 = smoothed_count(&[0.3], 0.3, 1.0, 1e-6, 10).unwrap();
        assert!((s - 1.0).abs() < 1e-5);
        // nothing nearby
        let s: f64 = smoothed_count(&[5.0, -4.0], 0.0, 1.0, 1e-6, 100).unwrap();
        assert!(s.abs() < 1e-6);
        assert!(smoothed_count(&[0.0], 0.0, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn smoothed_count_equals_integrated_im_m() {
        // midpoint quadrature of (N/(pi kappa)) int Im m_N(E' + i eps/N) dE'
        let eigs = [-0.31, -0.02, 0.015, 0.2, 0.44];
        let (n, e, kappa, eps) = (5usize, 0.01, 0.4, 0.3);
        let nf = n as f64;
        let lo = e - kappa / (2.0 * nf);
        let steps = 20_000;
        let h = kappa / nf / steps as f64;
        let mut acc = 0.0;
        for i in 0..steps {
            let x = lo + (i as f64 + 0.5) * h;
            let z = UpperHalfPoint::new(x, eps / nf).unwrap();
            acc += m_n(&eigs, &z).im * h;
        }
        let quad = nf / (std::f64::consts::PI * kappa) * acc;
        let s = smoothed_count(&eigs, e, kappa, eps, n).unwrap();
        assert!((quad - s).abs() < 1e-6, "{quad} vs {s}");
    }

    #[test]
    fn zero_matrix_average_dos_is_tiny_off_the_atom() {
        let eigs = [0.0f64; 4];
        let (e, eps, n) = (0.7, 0.5, 4.0);
        let z = UpperHalfPoint::new(e, eps / n).unwrap();
        let v = m_n(&eigs, &z).im / std::f64::consts::PI;
        let expect = (eps / n) / (e * e + (eps / n) * (eps / n)) / std::f64::consts::PI;
        assert!((v - expect).abs() < 1e-15);
        assert!(v < 0.1);
    }

    #[test]
    fn histogram_bins_partition_spectrum() {
        let eigs: Vec<f64> = crate::semicircle::semicircle_quantiles(4000);
        let bins = density_histogram(&eigs, -2.0, 2.0, 40).unwrap();
        let mass: f64 = bins.iter().map(|b| b.estimate * 0.1).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        for b in bins.iter().filter(|b| b.center.abs() < 1.5) {
            assert!((b.estimate / b.expected - 1.0).abs() < 0.05);
        }
    }
}
