//! Stieltjes transforms, the semicircle fixed-point equation and the
//! self-consistency decomposition of the diagonal resolvent entries.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::ensemble::{sample_wigner, EnsembleSpec};
use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;
use crate::mc::Runner;
use crate::scalar::{Cplx, Real};
use crate::spectral::{eigenvalues, SchurParts};
use crate::stats::MeanEstimate;

/// `z = E + i eta` with `eta > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UpperHalfPoint<T> {
    pub e: T,
    pub eta: T,
}

impl<T: Real> UpperHalfPoint<T> {
    pub fn new(e: T, eta: T) -> Result<Self> {
        if !(eta > T::zero()) || !e.is_finite() || !eta.is_finite() {
            return Err(Error::Argument(format!(
                "need a finite point with eta > 0, got E = {e}, eta = {eta}"
            )));
        }
        Ok(Self { e, eta })
    }

    pub fn z(&self) -> Cplx<T> {
        Complex::new(self.e, self.eta)
    }
}

/// `(1/N) sum_a 1/(mu_a - z)`.
pub fn m_n<T: Real>(eigs: &[T], z: &UpperHalfPoint<T>) -> Cplx<T> {
    let zz = z.z();
    let s = eigs
        .iter()
        .fold(Cplx::<T>::zero(), |acc, &mu| acc + (Complex::new(mu, T::zero()) - zz).inv());
    s / T::from_usize_lossy(eigs.len().max(1))
}

/// Root of `m^2 + z m + 1 = 0` in the upper half plane.
pub fn m_sc<T: Real>(z: &UpperHalfPoint<T>) -> Cplx<T> {
    let zz = z.z();
    let two = T::lit(2.0);
    let disc = (zz * zz - Complex::new(T::lit(4.0), T::zero())).sqrt();
    let r1 = (-zz + disc) / two;
    let r2 = (-zz - disc) / two;
    // the two roots multiply to 1, so exactly one lies in the upper half plane
    if r1.im > r2.im {
        r1
    } else {
        r2
    }
}

/// `|m + 1/(z + m)|`.
pub fn fixed_point_residual<T: Real>(m: Cplx<T>, z: &UpperHalfPoint<T>) -> Result<T> {
    let d = z.z() + m;
    if d.is_zero() {
        return Err(Error::Singular("z + m = 0".into()));
    }
    Ok((m + d.inv()).norm())
}

/// The three summands of `X^(j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SelfConsistency<T> {
    /// `-h_jj`.
    pub hjj_term: Cplx<T>,
    /// `((N-1)/N) m^(j)(z) - m_N(z)`.
    pub minor_drift: Cplx<T>,
    /// `(1/N) sum_a (xi_a - 1)/(lambda_a - z)`.
    pub y: Cplx<T>,
    /// `m_N(z)` of the full matrix, kept for the identity.
    pub m_n: Cplx<T>,
}

impl<T: Real> SelfConsistency<T> {
    pub fn x(&self) -> Cplx<T> {
        self.hjj_term + self.minor_drift + self.y
    }

    /// `-1 / (z + m_N + X)`, which equals `G_jj(z)`.
    pub fn resolvent(&self, z: &UpperHalfPoint<T>) -> Cplx<T> {
        -(z.z() + self.m_n + self.x()).inv()
    }
}

/// Decomposition of `X^(j)(z)` from the spectral data of the minor.
pub fn self_consistency_terms<T: Real>(
    h: &HermitianMatrix<T>,
    z: &UpperHalfPoint<T>,
    j: usize,
) -> Result<SelfConsistency<T>> {
    if h.n() < 2 {
        return Err(Error::Dimension("self-consistency terms need N >= 2".into()));
    }
    let eigs = eigenvalues(h)?;
    let parts = SchurParts::new(h, j)?;
    Ok(self_consistency_from_parts(&eigs, &parts, z))
}

/// Same as [`self_consistency_terms`] with the spectrum of `H` and the minor
/// data already computed.
pub fn self_consistency_from_parts<T: Real>(
    eigs: &[T],
    parts: &SchurParts<T>,
    z: &UpperHalfPoint<T>,
) -> SelfConsistency<T> {
    let n = parts.n();
    let nf = T::from_usize_lossy(n);
    let zz = z.z();
    let mn = m_n(eigs, z);
    let mut minor_sum = Cplx::<T>::zero();
    let mut y = Cplx::<T>::zero();
    for (&l, &xi) in parts.minor_eigenvalues.iter().zip(&parts.xi) {
        let g = (Complex::new(l, T::zero()) - zz).inv();
        minor_sum += g;
        y += g * (xi - T::one());
    }
    SelfConsistency {
        hjj_term: Complex::new(-parts.diagonal, T::zero()),
        minor_drift: minor_sum / nf - mn,
        y: y / nf,
        m_n: mn,
    }
}

/// Checks `mu_a <= lambda_a <= mu_{a+1}` up to `1e-10`.
pub fn interlacing_check<T: Real>(eigs_h: &[T], eigs_b: &[T]) -> Result<bool> {
    if eigs_h.is_empty() || eigs_b.len() + 1 != eigs_h.len() {
        return Err(Error::Argument(format!(
            "expected lengths N and N-1, got {} and {}",
            eigs_h.len(),
            eigs_b.len()
        )));
    }
    let tol = T::lit(1e-10);
    Ok(eigs_b
        .iter()
        .enumerate()
        .all(|(a, &l)| eigs_h[a] - tol <= l && l <= eigs_h[a + 1] + tol))
}

/// One row of a Stieltjes scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StieltjesPoint {
    pub e: f64,
    pub eta: f64,
    pub m_n: Complex<f64>,
    pub m_sc: Complex<f64>,
    /// Mean over realizations of the fixed-point residual of `m_N`.
    pub residual: f64,
    pub reps: usize,
    /// Standard error of `Im m_N`.
    pub stderr: f64,
}

/// Averages `m_N` over realizations on every point of `points`.
pub fn stieltjes_scan<T: Real>(
    spec: &EnsembleSpec,
    points: &[UpperHalfPoint<f64>],
    reps: usize,
    runner: &Runner,
) -> Result<Vec<StieltjesPoint>> {
    if reps == 0 {
        return Err(Error::Argument("reps must be at least 1".into()));
    }
    let per_rep = runner.run(reps, |_, s| {
        let eigs = eigenvalues(&sample_wigner::<T>(spec, s)?)?;
        let eigs: Vec<f64> = eigs.iter().map(|x| x.as_f64()).collect();
        points
            .iter()
            .map(|z| {
                let m = m_n(&eigs, z);
                Ok((m, fixed_point_residual(m, z)?))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(points
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let r = reps as f64;
            let mean = per_rep.iter().map(|v| v[k].0).sum::<Complex<f64>>() / r;
            let im: Vec<f64> = per_rep.iter().map(|v| v[k].0.im).collect();
            StieltjesPoint {
                e: z.e,
                eta: z.eta,
                m_n: mean,
                m_sc: m_sc(z),
                residual: per_rep.iter().map(|v| v[k].1).sum::<f64>() / r,
                reps,
                stderr: MeanEstimate::from_samples(&im).stderr,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::EntryLaw;
    use crate::rng::derive_stream;
    use crate::spectral::{principal_minor, resolvent_diag};

    fn p(e: f64, eta: f64) -> UpperHalfPoint<f64> {
        UpperHalfPoint::new(e, eta).unwrap()
    }

    #[test]
    fn rejects_real_axis() {
        assert!(UpperHalfPoint::new(0.0, 0.0).is_err());
        assert!(UpperHalfPoint::new(0.0, -1.0).is_err());
    }

    #[test]
    fn m_n_small_cases() {
        let m = m_n(&[0.0], &p(0.0, 1.0));
        assert!((m - Complex::new(0.0, 1.0)).norm() < 1e-15);
        let m = m_n(&[-1.0, 1.0], &p(0.0, 1.0));
        assert!((m - Complex::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn m_sc_values() {
        let m = m_sc(&p(0.0, 1.0));
        assert!((m - Complex::new(0.0, (5f64.sqrt() - 1.0) / 2.0)).norm() < 1e-14);
        let m = m_sc(&p(0.0, 2.0));
        assert!((m - Complex::new(0.0, 2f64.sqrt() - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn m_sc_branch_on_a_grid() {
        for i in 0..40 {
            for k in 0..25 {
                let e = -5.0 + 10.0 * i as f64 / 39.0;
                let eta = 10f64.powf(-6.0 + 7.0 * k as f64 / 24.0);
                let z = p(e, eta);
                let m = m_sc(&z);
                assert!(m.im > 0.0, "E={e} eta={eta}");
                assert!(fixed_point_residual(m, &z).unwrap() < 1e-12 * (1.0 + 1.0 / eta));
            }
        }
    }

    #[test]
    fn residual_arithmetic() {
        let r = fixed_point_residual(Complex::new(0.0, 0.0), &p(0.0, 2.0)).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
        let z = p(0.0, 1.0);
        assert!(matches!(
            fixed_point_residual(Complex::new(0.0, -1.0), &z),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn m_n_bounds() {
        let eigs = [-1.3, -0.2, 0.0, 0.7, 2.2];
        for eta in [1e-3, 0.1, 1.0, 10.0] {
            let m = m_n(&eigs, &p(0.3, eta));
            assert!(m.im > 0.0);
            assert!(m.norm() <= 1.0 / eta + 1e-12);
        }
    }

    #[test]
    fn two_by_two_identity() {
        let h = HermitianMatrix::<f64>::from_rows(&[
            vec![Complex::new(0.4, 0.0), Complex::new(-0.3, 0.5)],
            vec![Complex::new(-0.3, -0.5), Complex::new(0.1, 0.0)],
        ])
        .unwrap();
        let z = p(0.2, 0.3);
        for j in 0..2 {
            let t = self_consistency_terms(&h, &z, j).unwrap();
            assert_eq!(t.hjj_term.re, -h.get(j, j).re);
            // closed form of G_jj for a 2x2 matrix
            let other = h.get(1 - j, 1 - j).re;
            let want = (Complex::new(other, 0.0) - z.z())
                / ((Complex::new(h.get(j, j).re, 0.0) - z.z()) * (Complex::new(other, 0.0) - z.z())
                    - h.get(0, 1).norm_sqr());
            assert!((t.resolvent(&z) - want).norm() < 1e-12 * want.norm());
        }
        let one = HermitianMatrix::<f64>::diagonal(&[1.0]);
        assert!(matches!(
            self_consistency_terms(&one, &z, 0),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn identity_matches_direct_resolvent() {
        for n in [2usize, 10, 50] {
            let spec = EnsembleSpec::new(n, EntryLaw::rademacher(), 0.0, 3).unwrap();
            let h: HermitianMatrix<f64> = sample_wigner(&spec, &mut derive_stream(3, n as u64)).unwrap();
            let z = p(0.3, 0.7 / n as f64 + 0.01);
            for j in 0..n {
                let t = self_consistency_terms(&h, &z, j).unwrap();
                let g = resolvent_diag(&h, z.z(), j).unwrap();
                assert!((t.resolvent(&z) - g).norm() <= 1e-8 * g.norm(), "N={n} j={j}");
            }
        }
    }

    #[test]
    fn interlacing_small() {
        assert!(interlacing_check(&[-1.0, 1.0], &[0.0]).unwrap());
        assert!(!interlacing_check(&[-1.0, 1.0], &[5.0]).unwrap());
        assert!(interlacing_check(&[-1.0, 1.0], &[0.0, 0.5]).is_err());
    }

    #[test]
    fn interlacing_random_minors() {
        let spec = EnsembleSpec::gue(30, 9);
        for rep in 0..20 {
            let h: HermitianMatrix<f64> = sample_wigner(&spec, &mut derive_stream(9, rep)).unwrap();
            let mu = eigenvalues(&h).unwrap();
            for j in 0..30 {
                let lam = eigenvalues(&principal_minor(&h, j).unwrap()).unwrap();
                assert!(interlacing_check(&mu, &lam).unwrap());
            }
        }
    }
}
