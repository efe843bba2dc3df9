//! Dyson Brownian motion, its transition kernel for small `N`, and the heat
//! flow on entry densities.

use num_complex::Complex;
use rustfft::{FftNum, FftPlanner};
use serde::Serialize;

use crate::ensemble::sample_gue;
use crate::error::{Error, Result};
use crate::grid::{DensityGrid, GridFn};
use crate::matrix::{real_det, HermitianMatrix};
use crate::rng::RngStream;
use crate::scalar::Real;
use crate::spectral::eigenvalues;

/// Smallest gap between the `y_k` accepted by [`qt_kernel`].
pub const MIN_GAP: f64 = 1e-6;

/// Sorted spectra of `H(t)` at the requested times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DbmPath<T> {
    pub times: Vec<f64>,
    pub spectra: Vec<Vec<T>>,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::Argument("times must start at 0".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Argument("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Matrices `H(t_k)`, with `H(t_{k+1}) = H(t_k) + sqrt(t_{k+1} - t_k) V_k` and
/// independent GUE increments drawn from `stream` in order.
pub fn dbm_matrices<T: Real>(
    h0: &HermitianMatrix<T>,
    times: &[f64],
    stream: &mut RngStream,
) -> Result<Vec<HermitianMatrix<T>>> {
    check_times(times)?;
    let mut out = Vec::with_capacity(times.len());
    out.push(h0.clone());
    for w in times.windows(2) {
        let v = sample_gue::<T>(h0.n(), stream);
        let next = out.last().expect("non-empty").add_scaled(&v, T::lit((w[1] - w[0]).sqrt()))?;
        out.push(next);
    }
    Ok(out)
}

pub fn dbm_path<T: Real>(h0: &HermitianMatrix<T>, times: &[f64], stream: &mut RngStream) -> Result<DbmPath<T>> {
    let spectra = dbm_matrices(h0, times, stream)?
        .iter()
        .map(eigenvalues)
        .collect::<Result<Vec<_>>>()?;
    Ok(DbmPath {
        times: times.to_vec(),
        spectra,
    })
}

/// `prod_{i<j} (x_j - x_i)`.
pub fn vandermonde<T: Real>(x: &[T]) -> T {
    let mut p = T::one();
    for j in 0..x.len() {
        for i in 0..j {
            p *= x[j] - x[i];
        }
    }
    p
}

/// `q_t(x; y) = (N/(2 pi t))^{N/2} Delta(x)/Delta(y) det[exp(-N (x_j - y_k)^2 / 2t)]`.
pub fn qt_kernel<T: Real>(x: &[T], y: &[T], t: T) -> Result<T> {
    let n = y.len();
    if n == 0 || x.len() != n {
        return Err(Error::Dimension(format!(
            "x and y must have the same positive length, got {} and {}",
            x.len(),
            n
        )));
    }
    if !(t > T::zero()) {
        return Err(Error::Argument("t must be positive".into()));
    }
    let gap = T::lit(MIN_GAP);
    for j in 0..n {
        for i in 0..j {
            if (y[j] - y[i]).abs() <= gap {
                return Err(Error::Degenerate(format!(
                    "y_{i} and y_{j} are closer than {MIN_GAP}; perturb y slightly"
                )));
            }
        }
    }
    let nf = T::from_usize_lossy(n);
    let two = T::lit(2.0);
    // rescale each row by its largest entry before the determinant
    let mut log_scale = T::zero();
    let mut a = Vec::with_capacity(n * n);
    for &xj in x {
        let ex: Vec<T> = y.iter().map(|&yk| -nf * (xj - yk) * (xj - yk) / (two * t)).collect();
        let m = ex.iter().copied().fold(T::neg_infinity(), T::max);
        log_scale += m;
        a.extend(ex.iter().map(|&e| (e - m).exp()));
    }
    let det = real_det(n, a);
    let pref = (nf / (two * T::PI() * t)).powf(nf / two);
    Ok(pref * vandermonde(x) / vandermonde(y) * det * log_scale.exp())
}

fn fft_filter<T: Real + FftNum>(f: &GridFn<T>, mult: impl Fn(T) -> T) -> (Vec<T>, Vec<Complex<T>>) {
    let n = f.len();
    let m = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<T>> = f
        .values
        .iter()
        .map(|&v| Complex::new(v, T::zero()))
        .chain(std::iter::repeat(Complex::new(T::zero(), T::zero())))
        .take(m)
        .collect();
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(m).process(&mut buf);
    let period = T::from_usize_lossy(m) * f.dx;
    let two_pi = T::lit(2.0) * T::PI();
    for (k, c) in buf.iter_mut().enumerate() {
        let kk = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
        let xi = two_pi * T::lit(kk) / period;
        *c *= mult(xi);
    }
    let spectrum = buf.clone();
    planner.plan_fft_inverse(m).process(&mut buf);
    let inv = T::one() / T::from_usize_lossy(m);
    (buf[..n].iter().map(|c| c.re * inv).collect(), spectrum)
}

/// `e^{tL} f` with `L = d^2/dx^2` for a signed grid function: multiplication
/// by `exp(-t xi^2)` after zero padding.
pub fn heat_flow<T: Real + FftNum>(f: &GridFn<T>, t: T) -> Result<GridFn<T>> {
    if !(t >= T::zero()) {
        return Err(Error::Argument("t must be nonnegative".into()));
    }
    let (values, _) = fft_filter(f, |xi| (-t * xi * xi).exp());
    let out = GridFn {
        x0: f.x0,
        dx: f.dx,
        values,
    };
    let before = f.integral();
    let tol = T::lit(1e-6) * (T::one() + f.l1_norm());
    if (out.integral() - before).abs() > tol || out.edge_mass() > T::lit(1e-6) {
        return Err(Error::Domain(
            "heat flow pushes mass past the grid; widen the grid".into(),
        ));
    }
    Ok(out)
}

/// `e^{tL} h` for a density, with values in `[-1e-12, 0)` clipped to zero.
pub fn heat_semigroup<T: Real + FftNum>(h: &DensityGrid<T>, t: T) -> Result<DensityGrid<T>> {
    if !(t > T::zero()) {
        return Err(Error::Argument("t must be positive".into()));
    }
    h.check_support()?;
    let mut out = heat_flow(h.as_fn(), t)?;
    let clip = T::lit(1e-12) * (T::one() + out.sup_norm());
    for v in out.values.iter_mut() {
        if *v < T::zero() {
            if *v < -clip {
                return Err(Error::Domain("heat flow produced negative density".into()));
            }
            *v = T::zero();
        }
    }
    DensityGrid::new(out.x0, out.dx, out.values)
}

/// `sum_{k<=n} (-t L)^k h / k!`, computed as the Fourier multiplier
/// `sum_{k<=n} (t xi^2)^k / k!`.
pub fn compensated_density<T: Real + FftNum>(h: &DensityGrid<T>, t: T, n: usize) -> Result<GridFn<T>> {
    if !(t >= T::zero()) {
        return Err(Error::Argument("t must be nonnegative".into()));
    }
    h.check_support()?;
    if n == 0 {
        return Ok(h.as_fn().clone());
    }
    let poly = |xi: T| {
        let s = t * xi * xi;
        let mut term = T::one();
        let mut acc = T::one();
        for k in 1..=n {
            term = term * s / T::from_usize_lossy(k);
            acc += term;
        }
        acc
    };
    let (_, input) = fft_filter(h.as_fn(), |_| T::one());
    // the density must be resolved well below the grid's Nyquist frequency
    let m = input.len();
    let total: T = input.iter().map(|c| c.norm()).sum();
    let high: T = input[m / 4..m - m / 4].iter().map(|c| c.norm()).sum();
    if !(total > T::zero()) || !(high <= T::lit(1e-9) * total) {
        return Err(Error::Resolution(
            "density is not smooth enough for the compensated flow on this grid".into(),
        ));
    }
    let (values, _) = fft_filter(h.as_fn(), poly);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Resolution("compensated density overflowed".into()));
    }
    Ok(GridFn {
        x0: h.x0(),
        dx: h.dx(),
        values,
    })
}

/// `|| e^{tL} h~ - h ||_1` for the order-`n` compensated density.
pub fn flow_error<T: Real + FftNum>(h: &DensityGrid<T>, t: T, n: usize) -> Result<T> {
    let comp = compensated_density(h, t, n)?;
    let back = heat_flow(&comp, t)?;
    Ok(back.sub(h.as_fn())?.l1_norm())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderFit {
    pub n: usize,
    pub times: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log t`.
    pub order: f64,
}

pub fn convergence_order<T: Real + FftNum>(h: &DensityGrid<T>, times: &[f64], n: usize) -> Result<OrderFit> {
    if times.len() < 2 || times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Argument("need at least two positive times".into()));
    }
    let errors = times
        .iter()
        .map(|&t| Ok(flow_error(h, T::lit(t), n)?.as_f64()))
        .collect::<Result<Vec<_>>>()?;
    if errors.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Accuracy {
            estimate: 0.0,
            tolerance: 0.0,
        });
    }
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(OrderFit {
        n,
        times: times.to_vec(),
        errors,
        order: sxy / sxx,
    })
}
