//! Dense complex matrices.

use std::io::{self, Write};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{cplx, Cplx, Real};

/// Dense `N x N` complex hermitian matrix in row-major storage.
///
/// Both triangles are stored; constructors only ever write one triangle and
/// mirror it with an exact conjugate, so `h[l][j] == conj(h[j][l])` holds
/// bit for bit and the diagonal has zero imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    n: usize,
    data: Vec<Cplx<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    /// Builds the matrix from its upper triangle: `f(j, l)` is called once for
    /// every `j <= l`. The imaginary part returned for the diagonal is dropped.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> Cplx<T>) -> Self {
        let mut m = Self::zeros(n);
        for j in 0..n {
            for l in j..n {
                let v = f(j, l);
                m.set_pair(j, l, v);
            }
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (j, &x) in d.iter().enumerate() {
            m.data[j * m.n + j] = cplx(x, T::zero());
        }
        m
    }

    /// Real symmetric matrix from rows; fails unless exactly symmetric.
    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        let complex: Vec<Vec<Cplx<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| cplx(x, T::zero())).collect())
            .collect();
        Self::from_rows(&complex)
    }

    /// Complex matrix from rows; fails unless exactly hermitian.
    pub fn from_rows(rows: &[Vec<Cplx<T>>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows must form a square matrix".into()));
        }
        for (j, row) in rows.iter().enumerate() {
            if row[j].im != T::zero() {
                return Err(Error::Argument(format!("diagonal entry {j} is not real")));
            }
            for (l, other) in rows.iter().enumerate().skip(j + 1) {
                if other[j] != row[l].conj() {
                    return Err(Error::Argument(format!(
                        "entries ({j},{l}) and ({l},{j}) are not conjugate"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, j: usize, l: usize) -> Cplx<T> {
        self.data[j * self.n + l]
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[Cplx<T>] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    /// Sets `(j, l)` and its mirror `(l, j)`.
    #[inline]
    pub fn set_pair(&mut self, j: usize, l: usize, v: Cplx<T>) {
        if j == l {
            self.data[j * self.n + j] = cplx(v.re, T::zero());
        } else {
            self.data[j * self.n + l] = v;
            self.data[l * self.n + j] = v.conj();
        }
    }

    /// `self + s * other`, both hermitian of equal size.
    pub fn add_scaled(&self, other: &Self, s: T) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::Dimension(format!(
                "cannot add {}x{} and {}x{} matrices",
                self.n, self.n, other.n, other.n
            )));
        }
        Ok(Self::from_upper(self.n, |j, l| {
            self.get(j, l) + other.get(j, l) * s
        }))
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|j| self.data[j * self.n + j].re).sum()
    }

    /// `Tr H^2 = sum |h_jl|^2`.
    pub fn trace_sq(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.trace_sq().sqrt()
    }

    /// Largest `|h_jl - conj(h_lj)|`; zero for every matrix built by this type.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.n {
            for l in 0..self.n {
                let d = (self.get(j, l) - self.get(l, j).conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[Cplx<T>]) -> Vec<Cplx<T>> {
        (0..self.n)
            .map(|j| {
                self.row(j)
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// `U H U*`, re-mirrored so the result is exactly hermitian.
    pub fn conjugate_by(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        let n = self.n;
        if u.rows() != n || u.cols() != n {
            return Err(Error::Dimension("conjugating matrix has wrong shape".into()));
        }
        // tmp = H U*
        let mut tmp = vec![Complex::zero(); n * n];
        for j in 0..n {
            for l in 0..n {
                let mut acc = Complex::zero();
                for k in 0..n {
                    acc += self.get(j, k) * u.get(l, k).conj();
                }
                tmp[j * n + l] = acc;
            }
        }
        Ok(Self::from_upper(n, |j, l| {
            let mut acc = Complex::zero();
            for k in 0..n {
                acc += u.get(j, k) * tmp[k * n + l];
            }
            acc
        }))
    }

    /// Dense copy of `H - z I` (row-major).
    pub(crate) fn shifted_dense(&self, z: Cplx<T>) -> Vec<Cplx<T>> {
        let mut a = self.data.clone();
        for j in 0..self.n {
            a[j * self.n + j] -= z;
        }
        a
    }

    /// Row-major CSV with `re,im` cell pairs.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for j in 0..self.n {
            let cells: Vec<String> = self
                .row(j)
                .iter()
                .map(|z| format!("{},{}", z.re, z.im))
                .collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// General dense complex matrix, column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cplx<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for j in 0..n {
            m.data[j * n + j] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub(crate) fn from_col_major(rows: usize, cols: usize, data: Vec<Cplx<T>>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    /// Unitary discrete Fourier matrix `F_jk = e^{-2 pi i jk/n} / sqrt(n)`.
    pub fn dft(n: usize) -> Self {
        let scale = T::one() / T::from_usize_lossy(n).sqrt();
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            for j in 0..n {
                let phase = -T::lit(2.0) * T::PI() * T::from_usize_lossy((j * k) % n)
                    / T::from_usize_lossy(n);
                m.data[k * n + j] = Complex::from_polar(scale, phase);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Cplx<T> {
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn col(&self, c: usize) -> &[Cplx<T>] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    /// Max-norm of `U* U - I`.
    pub fn orthonormality_defect(&self) -> T {
        let mut worst = T::zero();
        for a in 0..self.cols {
            for b in a..self.cols {
                let dot = self
                    .col(a)
                    .iter()
                    .zip(self.col(b))
                    .fold(Complex::zero(), |acc: Cplx<T>, (x, y)| acc + x.conj() * *y);
                let target = if a == b { T::one() } else { T::zero() };
                let d = (dot - Complex::new(target, T::zero())).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

/// Solves `A x = b` for a dense row-major complex `A` by Gaussian elimination
/// with partial pivoting. `A` and `b` are consumed as workspace.
pub(crate) fn lu_solve<T: Real>(
    n: usize,
    mut a: Vec<Cplx<T>>,
    mut b: Vec<Cplx<T>>,
) -> Result<Vec<Cplx<T>>> {
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|r| (r, a[r * n + k].norm()))
            .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax <= T::zero() || !pmax.is_finite() {
            return Err(Error::Singular(format!("zero pivot in column {k}")));
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            b.swap(k, p);
        }
        let piv = a[k * n + k];
        for r in (k + 1)..n {
            let f = a[r * n + k] / piv;
            if f.is_zero() {
                continue;
            }
            for c in (k + 1)..n {
                let akc = a[k * n + c];
                a[r * n + c] -= f * akc;
            }
            let bk = b[k];
            b[r] -= f * bk;
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in (k + 1)..n {
            acc -= a[k * n + c] * b[c];
        }
        b[k] = acc / a[k * n + k];
    }
    Ok(b)
}

/// Determinant of a small dense real matrix (row-major), by LU with partial
/// pivoting.
pub(crate) fn real_det<T: Real>(n: usize, mut a: Vec<T>) -> T {
    let mut det = T::one();
    for k in 0..n {
        let mut p = k;
        for r in (k + 1)..n {
            if a[r * n + k].abs() > a[p * n + k].abs() {
                p = r;
            }
        }
        if a[p * n + k] == T::zero() {
            return T::zero();
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            det = -det;
        }
        let piv = a[k * n + k];
        det *= piv;
        for r in (k + 1)..n {
            let f = a[r * n + k] / piv;
            for c in (k + 1)..n {
                let akc = a[k * n + c];
                a[r * n + c] -= f * akc;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirror_is_exact() {
        let h = HermitianMatrix::<f64>::from_upper(3, |j, l| {
            Complex::new(0.1 * (j + 2 * l) as f64, 0.7 * (l as f64 - j as f64) + 0.3)
        });
        assert_eq!(h.hermiticity_defect(), 0.0);
        assert_eq!(h.get(1, 1).im, 0.0);
        assert_eq!(h.get(2, 0), h.get(0, 2).conj());
    }

    #[test]
    fn from_rows_rejects_non_hermitian() {
        let rows = vec![
            vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)],
            vec![Complex::new(0.0, 1.0), Complex::new(2.0, 0.0)],
        ];
        assert!(HermitianMatrix::<f64>::from_rows(&rows).is_err());
    }

    #[test]
    fn lu_solves_small_system() {
        let a = vec![
            Complex::new(2.0, 0.0),
            Complex::new(1.0, 1.0),
            Complex::new(1.0, -1.0),
            Complex::new(3.0, 0.0),
        ];
        let x_true = vec![Complex::new(1.0, 2.0), Complex::new(-0.5, 0.25)];
        let b = vec![
            a[0] * x_true[0] + a[1] * x_true[1],
            a[2] * x_true[0] + a[3] * x_true[1],
        ];
        let x = lu_solve(2, a, b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).norm() < 1e-14);
        }
    }

    #[test]
    fn dft_is_unitary() {
        let f = ComplexMatrix::<f64>::dft(8);
        assert!(f.orthonormality_defect() < 1e-13);
    }

    #[test]
    fn real_det_matches_expansion() {
        let a: Vec<f64> = vec![2.0, -1.0, 0.5, 1.0, 3.0, -2.0, 0.0, 4.0, 1.0];
        let expect: f64 = 2.0 * (3.0 * 1.0 - (-2.0) * 4.0) + (1.0 * 1.0 - (-2.0) * 0.0)
            + 0.5 * (1.0 * 4.0 - 3.0 * 0.0);
        assert!((real_det(3, a) - expect).abs() < 1e-12);
    }

    #[test]
    fn csv_has_re_im_pairs() {
        let h = HermitianMatrix::<f64>::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.5]]).unwrap();
        let mut out = Vec::new();
        h.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0,0,1,0\n1,0,0.5,0\n");
    }
}
