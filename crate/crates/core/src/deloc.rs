//! Eigenvector delocalization statistics.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::ensemble::{sample_wigner, EnsembleSpec};
use crate::error::{Error, Result};
use crate::mc::Runner;
use crate::scalar::{Cplx, Real};
use crate::spectral::{hermitian_eig, SpectralDecomposition};

/// Default bulk margin: the bulk is `|mu| <= 2 - kappa`.
pub const DEFAULT_BULK_MARGIN: f64 = 0.2;

/// Exponent `p` of an `l^p` norm, restricted to `p > 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormExponent {
    Finite(f64),
    Infinity,
}

impl NormExponent {
    pub fn finite(p: f64) -> Result<Self> {
        let e = NormExponent::Finite(p);
        e.check()?;
        Ok(e)
    }

    fn check(&self) -> Result<()> {
        match *self {
            NormExponent::Finite(p) if !(p > 2.0) || !p.is_finite() => Err(Error::Argument(format!(
                "norm exponent must be in (2, inf], got {p}"
            ))),
            _ => Ok(()),
        }
    }

    /// `1/p`, zero for the sup norm.
    pub fn reciprocal(&self) -> f64 {
        match *self {
            NormExponent::Finite(p) => 1.0 / p,
            NormExponent::Infinity => 0.0,
        }
    }
}

impl fmt::Display for NormExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormExponent::Finite(p) => write!(f, "{p}"),
            NormExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for NormExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" => Ok(NormExponent::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::Argument(format!("bad norm exponent '{other}'")))?;
                if p.is_infinite() {
                    return Ok(NormExponent::Infinity);
                }
                NormExponent::finite(p)
            }
        }
    }
}

impl Serialize for NormExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `(sum |v_i|^p)^{1/p}`, or `max |v_i|`.
pub fn lp_norm<T: Real>(v: &[Cplx<T>], p: NormExponent) -> Result<T> {
    p.check()?;
    Ok(match p {
        NormExponent::Infinity => v.iter().map(|c| c.norm()).fold(T::zero(), T::max),
        NormExponent::Finite(p) => {
            // scale by the largest modulus to keep |v_i|^p representable
            let m = v.iter().map(|c| c.norm()).fold(T::zero(), T::max);
            if m == T::zero() {
                return Ok(T::zero());
            }
            let pp = T::lit(p);
            let s: T = v.iter().map(|c| (c.norm() / m).powf(pp)).sum();
            m * s.powf(T::one() / pp)
        }
    })
}

/// `M = ||v||_p N^{1/2 - 1/p}` for a unit vector.
pub fn deloc_statistic<T: Real>(v: &[Cplx<T>], p: NormExponent) -> Result<T> {
    let n2: T = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    let tol = T::lit(1e-8).max(T::epsilon() * T::lit(64.0) * T::from_usize_lossy(v.len()));
    if v.is_empty() || (n2 - T::one()).abs() > tol {
        return Err(Error::Argument(format!("expected a unit vector, got norm {n2}")));
    }
    let n = T::from_usize_lossy(v.len());
    Ok(lp_norm(v, p)? * n.powf(T::lit(0.5 - p.reciprocal())))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DelocRecord {
    pub mu: f64,
    pub p: NormExponent,
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelocReport {
    pub n: usize,
    pub p: NormExponent,
    pub bulk_margin: f64,
    pub records: Vec<DelocRecord>,
    /// Largest `M` over eigenvectors with `|mu| <= 2 - bulk_margin`.
    pub bulk_max: f64,
    pub bulk_median: f64,
    pub bulk_q90: f64,
    pub bulk_count: usize,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Statistic of every eigenvector of a decomposition computed with vectors.
pub fn deloc_report<T: Real>(
    dec: &SpectralDecomposition<T>,
    p: NormExponent,
    bulk_margin: f64,
) -> Result<DelocReport> {
    p.check()?;
    if dec.eigenvectors.is_none() {
        return Err(Error::Argument("decomposition has no eigenvectors".into()));
    }
    let n = dec.n();
    let records = (0..n)
        .map(|a| {
            let v = dec.vector(a).expect("vectors present");
            Ok(DelocRecord {
                mu: dec.eigenvalues[a].as_f64(),
                p,
                m: deloc_statistic(v, p)?.as_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bulk: Vec<f64> = records
        .iter()
        .filter(|r| r.mu.abs() <= 2.0 - bulk_margin)
        .map(|r| r.m)
        .collect();
    bulk.sort_by(|a, b| a.total_cmp(b));
    Ok(DelocReport {
        n,
        p,
        bulk_margin,
        bulk_max: bulk.last().copied().unwrap_or(f64::NAN),
        bulk_median: quantile(&bulk, 0.5),
        bulk_q90: quantile(&bulk, 0.9),
        bulk_count: bulk.len(),
        records,
    })
}

/// `max N ||v||_inf^2` over bulk eigenvectors.
pub fn bulk_max_sup_sq<T: Real>(dec: &SpectralDecomposition<T>, bulk_margin: f64) -> Result<f64> {
    let r = deloc_report(dec, NormExponent::Infinity, bulk_margin)?;
    Ok(r.bulk_max * r.bulk_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailPoint {
    pub m: f64,
    pub probability: f64,
    pub hits: usize,
    pub reps: usize,
}

/// Fraction of realizations having an eigenvector with eigenvalue in
/// `[E - K/2N, E + K/2N]` and statistic at least `M`, for each `M`.
pub fn deloc_tail<T: Real>(
    spec: &EnsembleSpec,
    e: f64,
    k: f64,
    p: NormExponent,
    m_grid: &[f64],
    reps: usize,
    runner: &Runner,
) -> Result<Vec<TailPoint>> {
    p.check()?;
    if reps == 0 || !(k > 0.0) {
        return Err(Error::Argument("need reps >= 1 and K > 0".into()));
    }
    let half = k / (2.0 * spec.n as f64);
    // None when the window holds no eigenvalue
    let maxima = runner.run(reps, |_, s| {
        let dec = hermitian_eig(&sample_wigner::<T>(spec, s)?, true)?;
        let mut best: Option<f64> = None;
        for a in 0..dec.n() {
            if (dec.eigenvalues[a].as_f64() - e).abs() <= half {
                let m = deloc_statistic(dec.vector(a).expect("vectors"), p)?.as_f64();
                best = Some(best.map_or(m, |b: f64| b.max(m)));
            }
        }
        Ok(best)
    })?;
    Ok(tail_curve(&maxima, m_grid))
}

/// Tail curve from per-realization maxima (`None` for an empty window).
pub fn tail_curve(maxima: &[Option<f64>], m_grid: &[f64]) -> Vec<TailPoint> {
    m_grid
        .iter()
        .map(|&m| {
            let hits = maxima.iter().filter(|x| matches!(x, Some(v) if *v >= m)).count();
            TailPoint {
                m,
                probability: hits as f64 / maxima.len().max(1) as f64,
                hits,
                reps: maxima.len(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn basis(n: usize, i: usize) -> Vec<Cplx<f64>> {
        let mut v = vec![Complex::new(0.0, 0.0); n];
        v[i] = Complex::new(1.0, 0.0);
        v
    }

    fn flat(n: usize) -> Vec<Cplx<f64>> {
        vec![Complex::new(1.0 / (n as f64).sqrt(), 0.0); n]
    }

    #[test]
    fn norms() {
        for p in [NormExponent::Finite(3.0), NormExponent::Finite(7.5), NormExponent::Infinity] {
            assert!((lp_norm(&basis(5, 2), p).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((lp_norm(&flat(16), NormExponent::Finite(4.0)).unwrap() - 0.5).abs() < 1e-14);
        assert!((lp_norm(&flat(16), NormExponent::Infinity).unwrap() - 0.25).abs() < 1e-15);
        assert!(lp_norm(&flat(4), NormExponent::Finite(2.0)).is_err());
        assert!("1.5".parse::<NormExponent>().is_err());
        assert_eq!("inf".parse::<NormExponent>().unwrap(), NormExponent::Infinity);
    }

    #[test]
    fn statistic_extremes() {
        let n = 25;
        let m = deloc_statistic(&basis(n, 0), NormExponent::Infinity).unwrap();
        assert!((m - 5.0).abs() < 1e-14);
        let m = deloc_statistic(&flat(n), NormExponent::Infinity).unwrap();
        assert!((m - 1.0).abs() < 1e-14);
        let m = deloc_statistic(&flat(n), NormExponent::Finite(4.0)).unwrap();
        assert!((m - 1.0).abs() < 1e-14);
        let mut bad = flat(n);
        bad[0] *= 2.0;
        assert!(deloc_statistic(&bad, NormExponent::Infinity).is_err());
    }

    #[test]
    fn phase_invariance_and_monotone_in_p() {
        let raw = [0.3, -0.1, 0.8, 0.2, -0.4];
        let nrm: f64 = raw.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
        let v: Vec<Cplx<f64>> = raw.iter().map(|x| Complex::new(x / nrm, 0.0)).collect();
        let w: Vec<Cplx<f64>> = v
            .iter()
            .enumerate()
            .map(|(i, c)| c * Complex::from_polar(1.0, 0.7 * i as f64))
            .collect();
        let a = deloc_statistic(&v, NormExponent::Infinity).unwrap();
        let b = deloc_statistic(&w, NormExponent::Infinity).unwrap();
        assert!((a - b).abs() < 1e-14);
        let mut last = f64::INFINITY;
        for p in [2.5, 3.0, 4.0, 8.0, 20.0] {
            let x = lp_norm(&v, NormExponent::Finite(p)).unwrap();
            assert!(x <= last + 1e-15);
            last = x;
        }
        assert!(lp_norm(&v, NormExponent::Infinity).unwrap() <= last + 1e-15);
    }

    #[test]
    fn tail_curve_is_monotone() {
        let maxima = [Some(1.5), None, Some(2.5), Some(1.1)];
        let c = tail_curve(&maxima, &[0.0, 1.2, 2.0, 3.0]);
        assert_eq!(c.iter().map(|t| t.hits).collect::<Vec<_>>(), vec![3, 2, 1, 0]);
    }
}
