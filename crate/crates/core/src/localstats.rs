//! Unfolded local eigenvalue statistics near a bulk energy and the sine-kernel
//! reference.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::real_det;
use crate::quad;
use crate::rng::RngStream;
use crate::scalar::Real;
use crate::semicircle::rho_sc;
use crate::stats::MeanEstimate;

/// Default half-width of the unfolding window, in mean spacings.
pub const DEFAULT_HALF_WIDTH: f64 = 100.0;
/// Default bin width of the pair histogram.
pub const DEFAULT_BIN_WIDTH: f64 = 0.1;
/// Default largest pair distance histogrammed.
pub const DEFAULT_MAX_DISTANCE: f64 = 3.0;

/// `sin(pi r)/(pi r)`.
pub fn sinc_pi(r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        let a = std::f64::consts::PI * r;
        a.sin() / a
    }
}

/// `det[sin(pi(x_i - x_j)) / (pi(x_i - x_j))]`.
pub fn sine_kernel_det<T: Real>(points: &[T]) -> Result<T> {
    let k = points.len();
    if k == 0 {
        return Err(Error::Argument("need at least one point".into()));
    }
    let mut a = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            a.push(T::lit(sinc_pi((points[i] - points[j]).as_f64())));
        }
    }
    Ok(real_det(k, a))
}

/// Sine-kernel two-point function `1 - sinc^2(pi r)`.
pub fn sine_two_point(r: f64) -> f64 {
    let s = sinc_pi(r);
    1.0 - s * s
}

/// `N rho_sc(E) (mu - E)` for every eigenvalue with `|x| <= half_width`.
pub fn rescale_near<T: Real>(eigs: &[T], e: f64, n: usize, half_width: f64) -> Result<Vec<f64>> {
    if !(e.abs() < 2.0) {
        return Err(Error::Argument(format!("energy {e} is not in the bulk (-2, 2)")));
    }
    if !(half_width > 0.0) {
        return Err(Error::Argument("half width must be positive".into()));
    }
    let scale = n as f64 * rho_sc(e);
    Ok(eigs
        .iter()
        .map(|&mu| scale * (mu.as_f64() - e))
        .filter(|x| x.abs() <= half_width)
        .collect())
}

/// Histogram estimate of the unfolded two-point function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub centers: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub counts: Vec<u64>,
    /// Bin average of `1 - sinc^2`, weighted like the estimator.
    pub sine_reference: Vec<f64>,
    pub reps: usize,
    pub half_width: f64,
    pub bin_width: f64,
    pub energy: f64,
    /// True when no sample had two points inside the window.
    pub empty: bool,
}

impl CorrelationEstimate {
    /// Largest `|R2 - 1 + sinc^2|` over bins whose center lies in `[lo, hi]`.
    pub fn max_sine_deviation(&self, lo: f64, hi: f64) -> f64 {
        self.centers
            .iter()
            .zip(self.values.iter().zip(&self.sine_reference))
            .filter(|(c, _)| **c >= lo && **c <= hi)
            .map(|(_, (v, s))| (v - s).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|R2 - 1|` over bins whose center lies in `[lo, hi]`.
    pub fn max_flat_deviation(&self, lo: f64, hi: f64) -> f64 {
        self.centers
            .iter()
            .zip(&self.values)
            .filter(|(c, _)| **c >= lo && **c <= hi)
            .map(|(_, v)| (v - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Pair histogram of already unfolded point sets, each restricted to
/// `[-half_width, half_width]`. Bin `[r1, r2)` is normalized by
/// `reps * int_{r1}^{r2} (L - r) dr` with `L = 2 half_width`, the expected
/// unordered pair count of a unit-intensity Poisson process on the window.
pub fn pair_correlation(
    unfolded: &[Vec<f64>],
    half_width: f64,
    bin_width: f64,
    max_distance: f64,
    energy: f64,
) -> Result<CorrelationEstimate> {
    if unfolded.is_empty() {
        return Err(Error::Argument("need at least one sample".into()));
    }
    let l = 2.0 * half_width;
    if !(bin_width > 0.0) || !(max_distance > 0.0) || max_distance >= l {
        return Err(Error::Argument(
            "need 0 < bin width and 0 < max distance < window length".into(),
        ));
    }
    let bins = (max_distance / bin_width).round().max(1.0) as usize;
    let reps = unfolded.len();
    let norm: Vec<f64> = (0..bins)
        .map(|b| {
            let (r1, r2) = (b as f64 * bin_width, (b + 1) as f64 * bin_width);
            l * (r2 - r1) - (r2 * r2 - r1 * r1) / 2.0
        })
        .collect();
    let mut counts = vec![0u64; bins];
    let mut sum = vec![0.0; bins];
    let mut sum_sq = vec![0.0; bins];
    let mut any_pair = false;
    for sample in unfolded {
        let mut xs: Vec<f64> = sample.iter().copied().filter(|x| x.abs() <= half_width).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        any_pair |= xs.len() >= 2;
        let mut local = vec![0u64; bins];
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                let r = xs[j] - xs[i];
                if r >= max_distance {
                    break;
                }
                let b = (r / bin_width) as usize;
                if b < bins {
                    local[b] += 1;
                }
            }
        }
        for b in 0..bins {
            counts[b] += local[b];
            let v = local[b] as f64 / norm[b];
            sum[b] += v;
            sum_sq[b] += v * v;
        }
    }
    let r = reps as f64;
    let values: Vec<f64> = sum.iter().map(|s| s / r).collect();
    let stderr = (0..bins)
        .map(|b| {
            if reps < 2 {
                return 0.0;
            }
            let var = ((sum_sq[b] - r * values[b] * values[b]) / (r - 1.0)).max(0.0);
            (var / r).sqrt()
        })
        .collect();
    let sine_reference = (0..bins)
        .map(|b| {
            let (r1, r2) = (b as f64 * bin_width, (b + 1) as f64 * bin_width);
            quad::integrate(|s| (l - s) * sine_two_point(s), r1, r2, 4, 12) / norm[b]
        })
        .collect();
    Ok(CorrelationEstimate {
        centers: (0..bins).map(|b| (b as f64 + 0.5) * bin_width).collect(),
        values,
        stderr,
        counts,
        sine_reference,
        reps,
        half_width,
        bin_width,
        energy,
        empty: !any_pair,
    })
}

/// Unfolds each spectrum around `E` and estimates the two-point function.
pub fn two_point_estimate<T: Real>(
    samples: &[Vec<T>],
    e: f64,
    n: usize,
    bin_width: f64,
    half_width: f64,
) -> Result<CorrelationEstimate> {
    let unfolded = samples
        .iter()
        .map(|s| rescale_near(s, e, n, half_width))
        .collect::<Result<Vec<_>>>()?;
    pair_correlation(&unfolded, half_width, bin_width, DEFAULT_MAX_DISTANCE, e)
}

/// A synthetic spectrum whose unfolded points around `E` form a unit-intensity
/// Poisson process on `[-half_width, half_width]`.
pub fn poisson_spectrum(e: f64, n: usize, half_width: f64, stream: &mut RngStream) -> Result<Vec<f64>> {
    if !(e.abs() < 2.0) {
        return Err(Error::Argument(format!("energy {e} is not in the bulk (-2, 2)")));
    }
    let scale = n as f64 * rho_sc(e);
    let mut out = Vec::new();
    let mut x = -half_width + stream.exponential();
    while x <= half_width {
        out.push(e + x / scale);
        x += stream.exponential();
    }
    Ok(out)
}

/// `N` independent semicircle-distributed points, sorted: the spectrum of a
/// diagonal matrix with no level repulsion.
pub fn iid_semicircle_spectrum(n: usize, stream: &mut RngStream) -> Vec<f64> {
    let mut out: Vec<f64> = (0..n)
        .map(|_| {
            // x-coordinate of a uniform point in the disc of radius 2
            let u = stream.uniform();
            let v = stream.uniform();
            2.0 * u.sqrt() * (2.0 * std::f64::consts::PI * v).cos()
        })
        .collect();
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Shape of a one-dimensional observable profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ObservableKind {
    /// `1{|x| <= half_width}`.
    Indicator { half_width: f64 },
    /// `exp(-x^2 / 2 sigma^2)`, cut to zero beyond `5 sigma`.
    Gaussian { sigma: f64 },
    /// `max(0, 1 - |x| / half_width)`.
    Triangular { half_width: f64 },
}

/// Product observable `O(x_1..x_k) = amplitude * prod f(x_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Observable {
    pub kind: ObservableKind,
    pub arity: usize,
    pub amplitude: f64,
}

impl Observable {
    pub fn new(kind: ObservableKind, arity: usize) -> Result<Self> {
        let w = match kind {
            ObservableKind::Indicator { half_width } | ObservableKind::Triangular { half_width } => half_width,
            ObservableKind::Gaussian { sigma } => sigma,
        };
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::Argument("observable width must be positive".into()));
        }
        if !(1..=2).contains(&arity) {
            return Err(Error::Argument(format!(
                "observables of arity {arity} are not supported (use 1 or 2)"
            )));
        }
        Ok(Self {
            kind,
            arity,
            amplitude: 1.0,
        })
    }

    pub fn zero(arity: usize) -> Result<Self> {
        let mut o = Self::new(ObservableKind::Indicator { half_width: 1.0 }, arity)?;
        o.amplitude = 0.0;
        Ok(o)
    }

    /// Radius outside which the profile vanishes.
    pub fn support(&self) -> f64 {
        match self.kind {
            ObservableKind::Indicator { half_width } | ObservableKind::Triangular { half_width } => half_width,
            ObservableKind::Gaussian { sigma } => 5.0 * sigma,
        }
    }

    pub fn profile(&self, x: f64) -> f64 {
        match self.kind {
            ObservableKind::Indicator { half_width } => (x.abs() <= half_width) as u8 as f64,
            ObservableKind::Gaussian { sigma } => {
                if x.abs() <= 5.0 * sigma {
                    (-x * x / (2.0 * sigma * sigma)).exp()
                } else {
                    0.0
                }
            }
            ObservableKind::Triangular { half_width } => (1.0 - x.abs() / half_width).max(0.0),
        }
    }

    pub fn eval(&self, xs: &[f64]) -> f64 {
        self.amplitude * xs.iter().map(|&x| self.profile(x)).product::<f64>()
    }

    /// `int O(x) det[K_sine](x) dx`.
    pub fn sine_reference(&self) -> f64 {
        let s = self.support();
        // split at the kinks so the rules stay accurate
        let breaks = [-s, 0.0, s];
        let rule: Vec<(f64, f64)> = breaks
            .windows(2)
            .flat_map(|w| quad::composite(w[0], w[1], 16, 16))
            .collect();
        match self.arity {
            1 => self.amplitude * rule.iter().map(|&(x, w)| w * self.profile(x)).sum::<f64>(),
            _ => {
                let mut acc = 0.0;
                for &(x, wx) in &rule {
                    let fx = self.profile(x);
                    if fx == 0.0 {
                        continue;
                    }
                    for &(y, wy) in &rule {
                        acc += wx * wy * fx * self.profile(y) * sine_two_point(x - y);
                    }
                }
                self.amplitude * acc
            }
        }
    }
}

/// Energies averaged over: `E0` when `b = 0`, otherwise the midpoints of
/// `points` equal cells of `[E0 - b, E0 + b]`.
pub fn energy_grid(e0: f64, b: f64, points: usize) -> Vec<f64> {
    if b == 0.0 || points <= 1 {
        return vec![e0];
    }
    (0..points)
        .map(|i| e0 - b + (i as f64 + 0.5) * 2.0 * b / points as f64)
        .collect()
}

/// Monte Carlo estimate of `int O p^(k)` in unfolded variables:
/// `(N^k / N(N-1)..(N-k+1)) * sum` over distinct ordered `k`-tuples of
/// `O(x)`, averaged over the energy grid and then over samples.
pub fn observable_statistic<T: Real>(
    samples: &[Vec<T>],
    e0: f64,
    b: f64,
    obs: &Observable,
    n: usize,
) -> Result<MeanEstimate> {
    if !(1..=2).contains(&obs.arity) {
        return Err(Error::Argument(format!("unsupported arity {}", obs.arity)));
    }
    if !(b >= 0.0) || e0.abs() + b >= 2.0 {
        return Err(Error::Argument("need b >= 0 and |E0| + b < 2".into()));
    }
    if samples.is_empty() {
        return Err(Error::Argument("need at least one sample".into()));
    }
    if n < obs.arity {
        return Err(Error::Dimension(format!("N = {n} is smaller than the arity")));
    }
    let nf = n as f64;
    let falling = if obs.arity == 1 { 1.0 } else { nf / (nf - 1.0) };
    let energies = energy_grid(e0, b, 21);
    let per_sample: Vec<f64> = samples
        .iter()
        .map(|s| -> Result<f64> {
            let mut tot = 0.0;
            for &e in &energies {
                let xs = rescale_near(s, e, n, obs.support())?;
                let v = match obs.arity {
                    1 => xs.iter().map(|&x| obs.eval(&[x])).sum::<f64>(),
                    _ => {
                        let mut acc = 0.0;
                        for (i, &x) in xs.iter().enumerate() {
                            for (j, &y) in xs.iter().enumerate() {
                                if i != j {
                                    acc += obs.eval(&[x, y]);
                                }
                            }
                        }
                        acc
                    }
                };
                tot += v;
            }
            Ok(falling * tot / energies.len() as f64)
        })
        .collect::<Result<_>>()?;
    Ok(MeanEstimate::from_samples(&per_sample))
}
