//! Dense hermitian eigensolver, principal minors and resolvent entries.
//!
//! Indices are zero-based throughout.

mod householder;
mod ql;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{lu_solve, ComplexMatrix, HermitianMatrix};
use crate::scalar::{Cplx, Real};

/// Ascending eigenvalues and, optionally, the matching orthonormal
/// eigenvectors (column `a` belongs to eigenvalue `a`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Option<ComplexMatrix<T>>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, a: usize) -> Option<&[Cplx<T>]> {
        self.eigenvectors.as_ref().map(|u| u.col(a))
    }

    /// Largest `||H u_a - mu_a u_a||_2` over all eigenpairs.
    pub fn max_residual(&self, h: &HermitianMatrix<T>) -> Option<T> {
        let u = self.eigenvectors.as_ref()?;
        let mut worst = T::zero();
        for (a, &mu) in self.eigenvalues.iter().enumerate() {
            let hu = h.mul_vec(u.col(a));
            let r = hu
                .iter()
                .zip(u.col(a))
                .map(|(x, y)| (*x - *y * mu).norm_sqr())
                .sum::<T>()
                .sqrt();
            worst = worst.max(r);
        }
        Some(worst)
    }
}

/// Eigen-decomposition of a hermitian matrix: Householder reduction to real
/// tridiagonal form followed by implicit-shift QL. Eigenvalues come back
/// ascending; ties keep the order produced by the QL sweep.
pub fn hermitian_eig<T: Real>(h: &HermitianMatrix<T>, want_vectors: bool) -> Result<SpectralDecomposition<T>> {
    let n = h.n();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: want_vectors.then(|| ComplexMatrix::zeros(0, 0)),
        });
    }
    let tri = householder::tridiagonalize(h, want_vectors);
    let mut d = tri.diag;
    let mut e = tri.off;
    if !want_vectors {
        ql::tql2(&mut d, &mut e, None)?;
        d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        return Ok(SpectralDecomposition {
            eigenvalues: d,
            eigenvectors: None,
        });
    }
    let mut z = vec![T::zero(); n * n];
    for j in 0..n {
        z[j * n + j] = T::one();
    }
    ql::tql2(&mut d, &mut e, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let eigenvalues: Vec<T> = order.iter().map(|&a| d[a]).collect();
    let mut u = Vec::with_capacity(n * n);
    for &a in &order {
        u.extend(z[a * n..(a + 1) * n].iter().map(|&x| Complex::new(x, T::zero())));
    }
    if let Some(refl) = tri.reflectors {
        refl.apply_q(&mut u, n);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: Some(ComplexMatrix::from_col_major(n, n, u)),
    })
}

/// Ascending eigenvalues only.
pub fn eigenvalues<T: Real>(h: &HermitianMatrix<T>) -> Result<Vec<T>> {
    Ok(hermitian_eig(h, false)?.eigenvalues)
}

/// The `(N-1) x (N-1)` matrix obtained by deleting row and column `j`.
pub fn principal_minor<T: Real>(h: &HermitianMatrix<T>, j: usize) -> Result<HermitianMatrix<T>> {
    let n = h.n();
    if n < 2 {
        return Err(Error::Dimension("a minor needs N >= 2".into()));
    }
    if j >= n {
        return Err(Error::Argument(format!("index {j} out of range for N = {n}")));
    }
    let keep = |i: usize| if i < j { i } else { i + 1 };
    Ok(HermitianMatrix::from_upper(n - 1, |a, b| h.get(keep(a), keep(b))))
}

/// Column `j` of `H` with the diagonal entry removed.
pub fn deleted_column<T: Real>(h: &HermitianMatrix<T>, j: usize) -> Vec<Cplx<T>> {
    (0..h.n()).filter(|&i| i != j).map(|i| h.get(i, j)).collect()
}

fn check_upper<T: Real>(z: Cplx<T>) -> Result<()> {
    if z.im > T::zero() {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "spectral parameter must have Im z > 0, got {}",
            z.im
        )))
    }
}

fn check_index<T: Real>(h: &HermitianMatrix<T>, j: usize) -> Result<()> {
    if j >= h.n() {
        return Err(Error::Argument(format!(
            "index {j} out of range for N = {}",
            h.n()
        )));
    }
    Ok(())
}

/// `(H - z)^{-1}(j, j)` from one linear solve against `e_j`.
pub fn resolvent_diag<T: Real>(h: &HermitianMatrix<T>, z: Cplx<T>, j: usize) -> Result<Cplx<T>> {
    check_upper(z)?;
    check_index(h, j)?;
    let n = h.n();
    let mut rhs = vec![Complex::zero(); n];
    rhs[j] = Complex::new(T::one(), T::zero());
    let x = lu_solve(n, h.shifted_dense(z), rhs)?;
    Ok(x[j])
}

/// Spectral data of the minor `B^(j)` together with the overlaps of the
/// deleted column with its eigenvectors.
#[derive(Clone, Debug)]
pub struct SchurParts<T> {
    /// `h_jj`.
    pub diagonal: T,
    /// Eigenvalues `lambda_a` of the minor, ascending.
    pub minor_eigenvalues: Vec<T>,
    /// `xi_a = N |u_a^* a|^2`.
    pub xi: Vec<T>,
}

impl<T: Real> SchurParts<T> {
    pub fn new(h: &HermitianMatrix<T>, j: usize) -> Result<Self> {
        check_index(h, j)?;
        let n = h.n();
        let minor = principal_minor(h, j)?;
        let dec = hermitian_eig(&minor, true)?;
        let a = deleted_column(h, j);
        let u = dec.eigenvectors.as_ref().expect("requested vectors");
        let nf = T::from_usize_lossy(n);
        let xi = (0..n - 1)
            .map(|al| {
                let dot = u
                    .col(al)
                    .iter()
                    .zip(&a)
                    .fold(Complex::zero(), |acc: Cplx<T>, (ui, ai)| acc + ui.conj() * *ai);
                nf * dot.norm_sqr()
            })
            .collect();
        Ok(Self {
            diagonal: h.get(j, j).re,
            minor_eigenvalues: dec.eigenvalues,
            xi,
        })
    }

    pub fn n(&self) -> usize {
        self.xi.len() + 1
    }

    /// `(1/N) sum_a xi_a / (lambda_a - z)`, the quadratic form
    /// `<a, (B - z)^{-1} a>`.
    pub fn sigma(&self, z: Cplx<T>) -> Cplx<T> {
        let nf = T::from_usize_lossy(self.n());
        self.minor_eigenvalues
            .iter()
            .zip(&self.xi)
            .fold(Complex::zero(), |acc: Cplx<T>, (&l, &x)| {
                acc + (Complex::new(l, T::zero()) - z).inv() * x
            })
            / nf
    }

    /// `1 / (h_jj - z - sigma(z))`.
    pub fn resolvent(&self, z: Cplx<T>) -> Cplx<T> {
        (Complex::new(self.diagonal, T::zero()) - z - self.sigma(z)).inv()
    }
}

/// `(H - z)^{-1}(j, j)` through the Schur complement formula evaluated in the
/// eigenbasis of the minor.
pub fn schur_diag<T: Real>(h: &HermitianMatrix<T>, z: Cplx<T>, j: usize) -> Result<Cplx<T>> {
    check_upper(z)?;
    check_index(h, j)?;
    if h.n() == 1 {
        return Ok((Complex::new(h.get(0, 0).re, T::zero()) - z).inv());
    }
    Ok(SchurParts::new(h, j)?.resolvent(z))
}

/// Overlaps `xi_a = N |u_a^* a|^2` of the deleted column `a` with the minor's
/// eigenvectors. They sum to `N ||a||^2`.
pub fn overlap_xi<T: Real>(h: &HermitianMatrix<T>, j: usize) -> Result<Vec<T>> {
    Ok(SchurParts::new(h, j)?.xi)
}
