//! Reduction of a complex hermitian matrix to real symmetric tridiagonal form.
//!
//! Lower-triangle variant of the classical unblocked algorithm: step `k`
//! builds a reflector `H_k = I - tau_k v_k v_k^*` (with `v_k[0] = 1`) that maps
//! column `k` below the diagonal onto a real multiple of `e_1`, then applies
//! `H_k^* A H_k` to the trailing block as a hermitian rank-2 update. After the
//! sweep `A = Q T Q^*` with `Q = H_0 H_1 ... H_{n-2}` and `T` real tridiagonal.
//!
//! The rank-2 update of step `k` and the matrix-vector product of step `k+1`
//! share one pass over the trailing block. Real and imaginary parts are kept
//! in separate arrays.

use num_complex::Complex;
use num_traits::Zero;

use crate::matrix::HermitianMatrix;
use crate::scalar::{cplx, Cplx, Real};

pub(crate) struct Tridiagonal<T> {
    pub diag: Vec<T>,
    /// `off[k]` couples `k` and `k + 1`; length `n`, last entry zero.
    pub off: Vec<T>,
    pub reflectors: Option<Reflectors<T>>,
}

/// Householder vectors, split into real and imaginary parts.
pub(crate) struct Reflectors<T> {
    n: usize,
    /// `v_k` occupies `offsets[k]..offsets[k] + n - k - 1`.
    re: Vec<T>,
    im: Vec<T>,
    tau: Vec<Cplx<T>>,
}

/// Split complex vector.
struct Split<T> {
    re: Vec<T>,
    im: Vec<T>,
}

impl<T: Real> Split<T> {
    fn zeros(n: usize) -> Self {
        Self {
            re: vec![T::zero(); n],
            im: vec![T::zero(); n],
        }
    }
}

pub(crate) fn tridiagonalize<T: Real>(h: &HermitianMatrix<T>, keep_reflectors: bool) -> Tridiagonal<T> {
    let n = h.n();
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n];
    if n == 0 {
        return Tridiagonal {
            diag,
            off,
            reflectors: keep_reflectors.then(|| Reflectors {
                n,
                re: Vec::new(),
                im: Vec::new(),
                tau: Vec::new(),
            }),
        };
    }
    // column-major lower triangle: a[j * n + i] = A(i, j), i >= j
    let mut a = Split::zeros(n * n);
    for j in 0..n {
        for i in j..n {
            let z = h.get(i, j);
            a.re[j * n + i] = z.re;
            a.im[j * n + i] = z.im;
        }
    }
    let steps = n - 1;
    let mut tau = vec![Complex::zero(); steps];
    let mut store = keep_reflectors.then(|| Split::<T>::zeros(steps * (steps + 1) / 2));
    let mut offset = 0usize;

    let mut v = Split::zeros(n);
    let mut w = Split::zeros(n);
    let mut v_next = Split::zeros(n);
    let mut y = Split::zeros(n);

    if steps > 0 {
        // first reflector and its unfused product
        let (beta, t) = reflector_from_column(&mut a, n, 0, &mut v);
        off[0] = beta;
        tau[0] = t;
        hemv(&a, n, 1, &v, &mut y);
    }
    for k in 0..steps {
        diag[k] = a.re[k * n + k];
        let m = n - k - 1;
        let t = tau[k];
        if let Some(s) = store.as_mut() {
            s.re[offset..offset + m].copy_from_slice(&v.re[..m]);
            s.im[offset..offset + m].copy_from_slice(&v.im[..m]);
            offset += m;
        }
        // y = tau B v, w = y - (tau/2)(y^* v) v
        let (mut dr, mut di) = (T::zero(), T::zero());
        for i in 0..m {
            let (yr, yi) = (y.re[i], y.im[i]);
            let (vr, vi) = (v.re[i], v.im[i]);
            let (pr, pi) = (t.re * yr - t.im * yi, t.re * yi + t.im * yr);
            y.re[i] = pr;
            y.im[i] = pi;
            dr += pr * vr + pi * vi;
            di += pr * vi - pi * vr;
        }
        let half = T::lit(0.5);
        let (ar, ai) = (-half * (t.re * dr - t.im * di), -half * (t.re * di + t.im * dr));
        for i in 0..m {
            let (vr, vi) = (v.re[i], v.im[i]);
            w.re[i] = y.re[i] + ar * vr - ai * vi;
            w.im[i] = y.im[i] + ar * vi + ai * vr;
        }
        // update the first trailing column, then fuse the rest
        rank2_column(&mut a, n, k + 1, k + 1, &v, &w);
        if k + 1 < steps {
            let (beta, t1) = reflector_from_column(&mut a, n, k + 1, &mut v_next);
            off[k + 1] = beta;
            tau[k + 1] = t1;
            let mm = m - 1;
            y.re[..mm].iter_mut().for_each(|x| *x = T::zero());
            y.im[..mm].iter_mut().for_each(|x| *x = T::zero());
            for j in k + 2..n {
                fused_column(&mut a, n, j, k + 1, &v, &w, &v_next, &mut y);
            }
            std::mem::swap(&mut v, &mut v_next);
        }
    }
    diag[n - 1] = a.re[(n - 1) * n + n - 1];
    let reflectors = store.map(|s| Reflectors {
        n,
        re: s.re,
        im: s.im,
        tau,
    });
    Tridiagonal {
        diag,
        off,
        reflectors,
    }
}

/// Builds the reflector that annihilates column `k` below row `k + 1`,
/// writes `v` (with `v[0] = 1`) into `out` and returns `(beta, tau)` with
/// `H^* x = beta e_1`.
fn reflector_from_column<T: Real>(a: &mut Split<T>, n: usize, k: usize, out: &mut Split<T>) -> (T, Cplx<T>) {
    let base = k * n + k + 1;
    let m = n - k - 1;
    let xr = &a.re[base..base + m];
    let xi = &a.im[base..base + m];
    let alpha = Complex::new(xr[0], xi[0]);
    // scaled sum of squares, as in a careful 2-norm
    let mut scale = T::zero();
    let mut ssq = T::one();
    for i in 1..m {
        for c in [xr[i], xi[i]] {
            if c != T::zero() {
                let ac = c.abs();
                if scale < ac {
                    ssq = T::one() + ssq * (scale / ac) * (scale / ac);
                    scale = ac;
                } else {
                    ssq += (ac / scale) * (ac / scale);
                }
            }
        }
    }
    let xnorm = scale * ssq.sqrt();
    out.re[0] = T::one();
    out.im[0] = T::zero();
    if xnorm == T::zero() && alpha.im == T::zero() {
        for i in 1..m {
            out.re[i] = T::zero();
            out.im[i] = T::zero();
        }
        return (alpha.re, Complex::zero());
    }
    let mut beta = alpha.norm().hypot(xnorm);
    if alpha.re >= T::zero() {
        beta = -beta;
    }
    let tau = cplx((beta - alpha.re) / beta, -alpha.im / beta);
    let s = (alpha - beta).inv();
    for i in 1..m {
        out.re[i] = s.re * xr[i] - s.im * xi[i];
        out.im[i] = s.re * xi[i] + s.im * xr[i];
    }
    (beta, tau)
}

/// `y = B v` for the trailing block starting at row/column `s`.
fn hemv<T: Real>(a: &Split<T>, n: usize, s: usize, v: &Split<T>, y: &mut Split<T>) {
    let m = n - s;
    y.re[..m].iter_mut().for_each(|x| *x = T::zero());
    y.im[..m].iter_mut().for_each(|x| *x = T::zero());
    for j in s..n {
        hemv_column(a, n, j, s, v, y);
    }
}

/// Adds the contribution of column `j` of the trailing block at `s` to
/// `y = B v`.
#[inline(always)]
fn hemv_column<T: Real>(a: &Split<T>, n: usize, j: usize, s: usize, v: &Split<T>, y: &mut Split<T>) {
    let lj = j - s;
    let len = n - j - 1;
    let base = j * n + j;
    let (vjr, vji) = (v.re[lj], v.im[lj]);
    let d = a.re[base];
    let cr = &a.re[base + 1..base + 1 + len];
    let ci = &a.im[base + 1..base + 1 + len];
    let vr = &v.re[lj + 1..lj + 1 + len];
    let vi = &v.im[lj + 1..lj + 1 + len];
    let (yr, yrest) = y.re[lj..].split_first_mut().expect("in range");
    let (yi, yirest) = y.im[lj..].split_first_mut().expect("in range");
    let yrest = &mut yrest[..len];
    let yirest = &mut yirest[..len];
    // four independent partial sums so the loop vectorizes
    let mut sr = [T::zero(); 4];
    let mut si = [T::zero(); 4];
    let body = len - len % 4;
    for i0 in (0..body).step_by(4) {
        for l in 0..4 {
            let i = i0 + l;
            let (c_r, c_i) = (cr[i], ci[i]);
            yrest[i] += c_r * vjr - c_i * vji;
            yirest[i] += c_r * vji + c_i * vjr;
            sr[l] += c_r * vr[i] + c_i * vi[i];
            si[l] += c_r * vi[i] - c_i * vr[i];
        }
    }
    for i in body..len {
        let (c_r, c_i) = (cr[i], ci[i]);
        yrest[i] += c_r * vjr - c_i * vji;
        yirest[i] += c_r * vji + c_i * vjr;
        sr[0] += c_r * vr[i] + c_i * vi[i];
        si[0] += c_r * vi[i] - c_i * vr[i];
    }
    let t2r = (sr[0] + sr[1]) + (sr[2] + sr[3]);
    let t2i = (si[0] + si[1]) + (si[2] + si[3]);
    *yr += d * vjr + t2r;
    *yi += d * vji + t2i;
}

/// Column `j` of the block at `s` gets `-= v w^* + w v^*`.
#[inline(always)]
fn rank2_column<T: Real>(a: &mut Split<T>, n: usize, j: usize, s: usize, v: &Split<T>, w: &Split<T>) {
    let lj = j - s;
    let len = n - j;
    let base = j * n + j;
    let (pr, pi) = (w.re[lj], -w.im[lj]);
    let (qr, qi) = (v.re[lj], -v.im[lj]);
    let cr = &mut a.re[base..base + len];
    let ci = &mut a.im[base..base + len];
    let vr = &v.re[lj..lj + len];
    let vi = &v.im[lj..lj + len];
    let wr = &w.re[lj..lj + len];
    let wi = &w.im[lj..lj + len];
    for i in 0..len {
        cr[i] -= vr[i] * pr - vi[i] * pi + wr[i] * qr - wi[i] * qi;
        ci[i] -= vr[i] * pi + vi[i] * pr + wr[i] * qi + wi[i] * qr;
    }
    ci[0] = T::zero();
}

/// Rank-2 update of column `j` (block at `s`, vectors `v`, `w`) fused with
/// its contribution to `y = B' v'` for the next block, which starts at
/// `s + 1`.
#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn fused_column<T: Real>(
    a: &mut Split<T>,
    n: usize,
    j: usize,
    s: usize,
    v: &Split<T>,
    w: &Split<T>,
    vn: &Split<T>,
    y: &mut Split<T>,
) {
    let lj = j - s;
    let lk = lj - 1;
    let len = n - j - 1;
    let base = j * n + j;
    let (pr, pi) = (w.re[lj], -w.im[lj]);
    let (qr, qi) = (v.re[lj], -v.im[lj]);
    // diagonal entry
    let d = a.re[base] - (v.re[lj] * pr - v.im[lj] * pi + w.re[lj] * qr - w.im[lj] * qi);
    a.re[base] = d;
    a.im[base] = T::zero();
    let (vjr, vji) = (vn.re[lk], vn.im[lk]);
    let cr = &mut a.re[base + 1..base + 1 + len];
    let ci = &mut a.im[base + 1..base + 1 + len];
    let vr = &v.re[lj + 1..lj + 1 + len];
    let vi = &v.im[lj + 1..lj + 1 + len];
    let wr = &w.re[lj + 1..lj + 1 + len];
    let wi = &w.im[lj + 1..lj + 1 + len];
    let nr = &vn.re[lk + 1..lk + 1 + len];
    let ni = &vn.im[lk + 1..lk + 1 + len];
    let (yr, yrest) = y.re[lk..].split_first_mut().expect("in range");
    let (yi, yirest) = y.im[lk..].split_first_mut().expect("in range");
    let yrest = &mut yrest[..len];
    let yirest = &mut yirest[..len];
    let mut sr = [T::zero(); 4];
    let mut si = [T::zero(); 4];
    let body = len - len % 4;
    for i0 in (0..body).step_by(4) {
        for l in 0..4 {
            let i = i0 + l;
            let c_r = cr[i] - (vr[i] * pr - vi[i] * pi + wr[i] * qr - wi[i] * qi);
            let c_i = ci[i] - (vr[i] * pi + vi[i] * pr + wr[i] * qi + wi[i] * qr);
            cr[i] = c_r;
            ci[i] = c_i;
            yrest[i] += c_r * vjr - c_i * vji;
            yirest[i] += c_r * vji + c_i * vjr;
            sr[l] += c_r * nr[i] + c_i * ni[i];
            si[l] += c_r * ni[i] - c_i * nr[i];
        }
    }
    for i in body..len {
        let c_r = cr[i] - (vr[i] * pr - vi[i] * pi + wr[i] * qr - wi[i] * qi);
        let c_i = ci[i] - (vr[i] * pi + vi[i] * pr + wr[i] * qi + wi[i] * qr);
        cr[i] = c_r;
        ci[i] = c_i;
        yrest[i] += c_r * vjr - c_i * vji;
        yirest[i] += c_r * vji + c_i * vjr;
        sr[0] += c_r * nr[i] + c_i * ni[i];
        si[0] += c_r * ni[i] - c_i * nr[i];
    }
    let t2r = (sr[0] + sr[1]) + (sr[2] + sr[3]);
    let t2i = (si[0] + si[1]) + (si[2] + si[3]);
    *yr += d * vjr + t2r;
    *yi += d * vji + t2i;
}

impl<T: Real> Reflectors<T> {
    /// Replaces each column `y` of `u` by `Q y`.
    pub fn apply_q(&self, u: &mut [Cplx<T>], cols: usize) {
        let n = self.n;
        let steps = n.saturating_sub(1);
        let mut offsets = Vec::with_capacity(steps);
        let mut o = 0;
        for k in 0..steps {
            offsets.push(o);
            o += n - k - 1;
        }
        for k in (0..steps).rev() {
            let tau = self.tau[k];
            if tau.is_zero() {
                continue;
            }
            let m = n - k - 1;
            let vr = &self.re[offsets[k]..offsets[k] + m];
            let vi = &self.im[offsets[k]..offsets[k] + m];
            for c in 0..cols {
                let y = &mut u[c * n + k + 1..c * n + n];
                let mut ar = [T::zero(); 4];
                let mut ai = [T::zero(); 4];
                let body = m - m % 4;
                for i0 in (0..body).step_by(4) {
                    for l in 0..4 {
                        let z = y[i0 + l];
                        ar[l] += vr[i0 + l] * z.re + vi[i0 + l] * z.im;
                        ai[l] += vr[i0 + l] * z.im - vi[i0 + l] * z.re;
                    }
                }
                for i in body..m {
                    let z = y[i];
                    ar[0] += vr[i] * z.re + vi[i] * z.im;
                    ai[0] += vr[i] * z.im - vi[i] * z.re;
                }
                let sr = (ar[0] + ar[1]) + (ar[2] + ar[3]);
                let si = (ai[0] + ai[1]) + (ai[2] + ai[3]);
                let s = tau * Complex::new(sr, si);
                for i in 0..m {
                    let z = Complex::new(vr[i], vi[i]);
                    y[i] -= s * z;
                }
            }
        }
    }
}
