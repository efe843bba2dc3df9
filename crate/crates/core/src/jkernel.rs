//! Correlation kernel of `H0 + sqrt(t) V` (V GUE) given the spectrum `y` of
//! `H0`, evaluated from its double contour integral representation.
//!
//! With `f(z) = (z^2 - 2uz)/2t + (1/N) sum log(z - y_j)`,
//! `h(w) = (exp(-tau (w - r)/(t rho)) - 1)/tau` and
//! `g(z, w) = (w - r + z - u)/(t (w - r)) - (1/(N (w - r))) sum (y_j - r)/((w - y_j)(z - y_j))`,
//! the normalized kernel `K(u, v)/(N rho)` with `v = u + tau/(N rho)` equals
//! `N int_gamma dz/2pi i int_Gamma dw/2pi i h(w) g(z, w) exp(N (f(w) - f(z)))`.
//! The integrand splits into sums of products of one-dimensional integrals,
//! so a query costs `O(nodes N)`.
//!
//! `gamma` is the pair of horizontal lines `Im z = -delta` (left to right) and
//! `Im z = +delta` (right to left); `Gamma` is the upward vertical line
//! `Re w = kappa`. Both are truncated at half-length `S` around their centers.
//!
//! Changing `r` multiplies `K(u, v)` by a positive factor of the form
//! `c(u)/c(v)`, so only gauge-invariant combinations such as
//! `K(u, v) K(v, u)` and the diagonal are compared across `r`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::localstats::sinc_pi;
use crate::quad::gauss_legendre;
use crate::semicircle::rho_sc;

/// Points per Gauss-Legendre panel.
const PANEL_ORDER: usize = 16;
/// Smallest admissible distance between `kappa` and any `y_j`.
const KAPPA_GAP: f64 = 1e-8;
/// Pole collision threshold on `Gamma`.
const POLE_GAP: f64 = 1e-10;

/// Density of `H0 + sqrt(t) V` when `H0` follows the semicircle law: a
/// semicircle of variance `1 + t`, supported on `|E| <= 2 sqrt(1 + t)`.
pub fn rho_t(e: f64, t: f64) -> f64 {
    let s = (1.0 + t).sqrt();
    rho_sc(e / s) / s
}

/// Contour geometry and quadrature resolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContourParams {
    /// Offset of the horizontal lines of `gamma` from the real axis.
    pub delta: f64,
    /// Abscissa of `Gamma`.
    pub kappa: f64,
    /// The free shift `r`.
    pub r: f64,
    /// Truncation half-length `S` of every segment.
    pub half_length: f64,
    /// Quadrature nodes per segment (rounded up to whole panels).
    pub nodes: usize,
    /// Largest accepted error estimate of the normalized kernel.
    pub tolerance: f64,
}

impl ContourParams {
    /// `r = kappa = E`, `delta = max(1/N, t/4)`, `S = 3(1 + sqrt t)`, 512 nodes.
    pub fn defaults(e: f64, t: f64, n: usize) -> Self {
        Self {
            delta: (1.0 / n.max(1) as f64).max(t / 4.0),
            kappa: e,
            r: e,
            half_length: 3.0 * (1.0 + t.sqrt()),
            nodes: 512,
            tolerance: 1e-3,
        }
    }

    pub fn validate(&self, y: &[f64]) -> Result<()> {
        if !(self.delta > 0.0) || !(self.half_length > 0.0) {
            return Err(Error::Contour("delta and S must be positive".into()));
        }
        if self.nodes < 64 {
            return Err(Error::Contour(format!(
                "need at least 64 nodes per segment, got {}",
                self.nodes
            )));
        }
        if !self.kappa.is_finite() || !self.r.is_finite() {
            return Err(Error::Contour("kappa and r must be finite".into()));
        }
        if let Some(yj) = y.iter().find(|&&yj| (yj - self.kappa).abs() < KAPPA_GAP) {
            return Err(Error::Contour(format!(
                "kappa = {} sits on y = {yj}; move kappa off the spectrum of H0",
                self.kappa
            )));
        }
        Ok(())
    }

    fn panels(&self) -> usize {
        self.nodes.div_ceil(PANEL_ORDER).max(1)
    }
}

/// Evaluation point of the kernel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelQuery {
    pub u: f64,
    pub v: f64,
    /// Reference energy.
    pub e: f64,
    pub t: f64,
    /// Spectrum of `H0`, sorted.
    pub y: Vec<f64>,
    /// Local density scale.
    pub varrho: f64,
}

impl KernelQuery {
    /// `u = E + x1/(N rho)`, `v = E + x2/(N rho)` with `rho = rho_t(E)`.
    pub fn rescaled(e: f64, t: f64, y: Vec<f64>, x1: f64, x2: f64) -> Result<Self> {
        let varrho = rho_t(e, t);
        let scale = y.len() as f64 * varrho;
        Self::new(e + x1 / scale, e + x2 / scale, e, t, y, varrho)
    }

    pub fn new(u: f64, v: f64, e: f64, t: f64, mut y: Vec<f64>, varrho: f64) -> Result<Self> {
        if !(t > 0.0) || !(varrho > 0.0) {
            return Err(Error::Argument("need t > 0 and rho > 0".into()));
        }
        if y.is_empty() {
            return Err(Error::Argument("y must be non-empty".into()));
        }
        let bound = 2.0 * (1.0 + t) + 1.0;
        if y.iter().any(|v| !(v.abs() <= bound)) {
            return Err(Error::Argument(format!(
                "every y_j must satisfy |y_j| <= {bound}"
            )));
        }
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::Argument("u and v must be finite".into()));
        }
        y.sort_by(|a, b| a.total_cmp(b));
        Ok(Self {
            u,
            v,
            e,
            t,
            y,
            varrho,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// `tau = N rho (v - u)`.
    pub fn tau(&self) -> f64 {
        self.n() as f64 * self.varrho * (self.v - self.u)
    }

    /// The same query with `u` and `v` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            u: self.v,
            v: self.u,
            ..self.clone()
        }
    }
}

/// `f(z) = (z^2 - 2uz)/2t + (1/N) sum log(z - y_j)` with principal logs.
pub fn f_n(z: C64, u: f64, t: f64, y: &[f64]) -> C64 {
    let n = y.len() as f64;
    (z * z - 2.0 * u * z) / (2.0 * t) + y.iter().map(|&yj| (z - yj).ln()).sum::<C64>() / n
}

/// `g(z, w)` as defined in the module documentation.
pub fn g_n(z: C64, w: C64, u: f64, r: f64, t: f64, y: &[f64]) -> C64 {
    let n = y.len() as f64;
    let s: C64 = y.iter().map(|&yj| (yj - r) / ((w - yj) * (z - yj))).sum();
    (w - r + z - u) / (t * (w - r)) - s / (n * (w - r))
}

/// `(1 - e^{-x})/x`, continuous at `x = 0`.
fn phi(x: C64) -> C64 {
    if x.norm() < 1e-3 {
        C64::new(1.0, 0.0) - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    } else {
        (C64::new(1.0, 0.0) - (-x).exp()) / x
    }
}

/// `h(w) = (exp(-tau (w - r)/(t rho)) - 1)/tau`, with the `tau -> 0` limit
/// `-(w - r)/(t rho)`.
pub fn h_n(w: C64, r: f64, tau: f64, t: f64, varrho: f64) -> C64 {
    let a = (w - r) / (t * varrho);
    -a * phi(a * tau)
}

/// `h(w)/(w - r)`, finite at `w = r`.
fn h_over(w: C64, r: f64, tau: f64, t: f64, varrho: f64) -> C64 {
    let a = (w - r) / (t * varrho);
    -phi(a * tau) / (t * varrho)
}

/// Full integrand `h(w) g(z, w) exp(N (f(w) - f(z)))`.
pub fn integrand(z: C64, w: C64, q: &KernelQuery, params: &ContourParams) -> Result<C64> {
    if q.y.iter().any(|&yj| (w - yj).norm() < POLE_GAP || (z - yj).norm() < POLE_GAP) {
        return Err(Error::Contour("integration point collides with a pole".into()));
    }
    let n = q.n() as f64;
    let r = params.r;
    let tau = q.tau();
    let ho = h_over(w, r, tau, q.t, q.varrho);
    let s: C64 = q.y.iter().map(|&yj| (yj - r) / ((w - yj) * (z - yj))).sum();
    // h g = ho ((w - r + z - u)/t - s/N), written without dividing by w - r
    let hg = ho * ((w - r + z - q.u) / q.t - s / n);
    Ok(hg * (n * (f_n(w, q.u, q.t, &q.y) - f_n(z, q.u, q.t, &q.y))).exp())
}

/// Result of one kernel evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelValue {
    /// `K(u, v)`.
    pub raw: C64,
    /// `K(u, v) / (N rho)`.
    pub normalized: C64,
    /// Estimated absolute error of `normalized`.
    pub error_estimate: f64,
    /// Node count actually used per segment.
    pub nodes: usize,
}

struct Node {
    x: C64,
    /// Quadrature weight times the contour derivative.
    dw: C64,
}

fn segment(a: C64, b: C64, panels: usize) -> Vec<Node> {
    let (gx, gw) = gauss_legendre(PANEL_ORDER);
    let d = b - a;
    let h = 1.0 / panels as f64;
    let mut out = Vec::with_capacity(panels * PANEL_ORDER);
    for p in 0..panels {
        let c = (p as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(&gw) {
            let s = c + 0.5 * h * x;
            out.push(Node {
                x: a + d * s,
                dw: d * (0.5 * h * w),
            });
        }
    }
    out
}

/// Partial sums of one contour with max-scaling: the true values are
/// `exp(scale) * sums`.
struct Side {
    scale: f64,
    i0: C64,
    i1: C64,
    per_pole: Vec<C64>,
    abs_mass: f64,
    tail: f64,
}

/// Runs `log_weight` over the nodes and accumulates `sum e^{L} dw`,
/// `sum e^{L} shift dw` and `sum e^{L}/(x - y_j) dw`.
fn accumulate(
    nodes: &[Node],
    y: &[f64],
    log_weight: impl Fn(C64) -> C64,
    shift: impl Fn(C64) -> C64,
    bound: impl Fn(C64) -> f64,
    tail_len: f64,
) -> Side {
    let logs: Vec<C64> = nodes.iter().map(|nd| log_weight(nd.x)).collect();
    let scale = logs
        .iter()
        .map(|l| l.re)
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut i0 = C64::new(0.0, 0.0);
    let mut i1 = C64::new(0.0, 0.0);
    let mut per_pole = vec![C64::new(0.0, 0.0); y.len()];
    let mut abs_mass = 0.0;
    for (nd, l) in nodes.iter().zip(&logs) {
        let e = (l - scale).exp();
        let ew = e * nd.dw;
        i0 += ew;
        i1 += ew * shift(nd.x);
        for (acc, &yj) in per_pole.iter_mut().zip(y) {
            *acc += ew / (nd.x - yj);
        }
        abs_mass += e.norm() * nd.dw.norm() * bound(nd.x);
    }
    let ends = [nodes.first(), nodes.last()];
    let tail = ends
        .iter()
        .flatten()
        .zip([logs.first(), logs.last()].iter().flatten())
        .map(|(nd, l)| (l.re - scale).exp() * bound(nd.x) * tail_len)
        .fold(0.0, f64::max);
    Side {
        scale,
        i0,
        i1,
        per_pole,
        abs_mass,
        tail,
    }
}

/// Normalized kernel and a tail estimate at a fixed resolution.
fn evaluate(q: &KernelQuery, p: &ContourParams, panels: usize) -> Result<(C64, f64)> {
    let n = q.n() as f64;
    let (t, u, r) = (q.t, q.u, p.r);
    let tau = q.tau();
    let s = p.half_length;
    let y = &q.y;
    let i = C64::new(0.0, 1.0);
    // gamma: lower line left to right, upper line right to left, centered at u
    let mut zs = segment(C64::new(u - s, -p.delta), C64::new(u + s, -p.delta), panels);
    zs.extend(segment(C64::new(u + s, p.delta), C64::new(u - s, p.delta), panels));
    // Gamma: upward
    let ws = segment(C64::new(p.kappa, -s), C64::new(p.kappa, s), panels);
    for nd in &ws {
        if y.iter().any(|&yj| (nd.x - yj).norm() < POLE_GAP) {
            return Err(Error::Contour("Gamma passes through a pole".into()));
        }
    }
    let max_inv = |x: C64| y.iter().map(|&yj| 1.0 / (x - yj).norm()).fold(0.0, f64::max);
    let tail_len = (t / n).sqrt();
    let zside = accumulate(
        &zs,
        y,
        |z| -n * f_n(z, u, t, y),
        |z| z - u,
        |z| 1.0 + (z - u).norm() + max_inv(z),
        tail_len,
    );
    let wside = accumulate(
        &ws,
        y,
        |w| n * f_n(w, u, t, y) + h_over(w, r, tau, t, q.varrho).ln(),
        |w| w - r,
        |w| (1.0 / t + 1.0) * (1.0 + (w - r).norm() + max_inv(w) * (1.0 + r.abs() + 4.0)),
        tail_len,
    );
    let cross: C64 = y
        .iter()
        .enumerate()
        .map(|(j, &yj)| (yj - r) * wside.per_pole[j] * zside.per_pole[j])
        .sum();
    let combo = (wside.i1 * zside.i0 + wside.i0 * zside.i1) / t - cross / n;
    let two_pi_i = 2.0 * std::f64::consts::PI * i;
    let pref = n / (two_pi_i * two_pi_i);
    let scale = (wside.scale + zside.scale).exp();
    let value = pref * combo * scale;
    let tail = pref.norm() * scale * (wside.tail * zside.abs_mass + wside.abs_mass * zside.tail);
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Accuracy {
            estimate: f64::INFINITY,
            tolerance: p.tolerance,
        });
    }
    Ok((value, tail))
}

/// `K(u, v)` with an a-posteriori error estimate: the tail bound plus the
/// change from halving the node count.
pub fn k_tn(q: &KernelQuery, params: &ContourParams) -> Result<KernelValue> {
    params.validate(&q.y)?;
    let panels = params.panels();
    let (fine, tail) = evaluate(q, params, panels)?;
    let (coarse, _) = evaluate(q, params, (panels / 2).max(1))?;
    let error_estimate = tail + (fine - coarse).norm();
    if !(error_estimate <= params.tolerance * fine.norm().max(1.0)) {
        return Err(Error::Accuracy {
            estimate: error_estimate,
            tolerance: params.tolerance,
        });
    }
    Ok(KernelValue {
        raw: fine * (q.n() as f64 * q.varrho),
        normalized: fine,
        error_estimate,
        nodes: panels * PANEL_ORDER,
    })
}

/// Like [`k_tn`] but returns the value even when the error estimate exceeds
/// the tolerance.
pub fn k_tn_unchecked(q: &KernelQuery, params: &ContourParams) -> Result<KernelValue> {
    let mut p = *params;
    p.tolerance = f64::INFINITY;
    k_tn(q, &p)
}

/// One row of a sine-limit table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SineRow {
    pub x1: f64,
    pub x2: f64,
    /// `K(u, v)`.
    pub raw: C64,
    /// `sign(Re K(u, v)) sqrt|K(u, v) K(v, u)| / (N rho)`: invariant under
    /// the gauge `K(u, v) -> c(u) K(u, v) / c(v)` with `c > 0`.
    pub normalized: f64,
    pub sinc: f64,
    pub abs_err: f64,
    pub error_estimate: f64,
}

/// Gauge-invariant normalized kernel at rescaled points `x1`, `x2`.
pub fn symmetric_normalized(
    e: f64,
    t: f64,
    y: &[f64],
    x1: f64,
    x2: f64,
    params: &ContourParams,
) -> Result<SineRow> {
    let q = KernelQuery::rescaled(e, t, y.to_vec(), x1, x2)?;
    let a = k_tn(&q, params)?;
    let (value, err) = if x1 == x2 {
        (a.normalized.re, a.error_estimate)
    } else {
        let b = k_tn(&q.swapped(), params)?;
        let prod = a.normalized * b.normalized;
        let m = prod.norm().sqrt();
        let err = if m > 0.0 {
            (a.error_estimate * b.normalized.norm() + b.error_estimate * a.normalized.norm()) / (2.0 * m)
        } else {
            (a.error_estimate * b.error_estimate).sqrt()
        };
        (a.normalized.re.signum() * m, err)
    };
    let sinc = sinc_pi(x2 - x1);
    Ok(SineRow {
        x1,
        x2,
        raw: a.raw,
        normalized: value,
        sinc,
        abs_err: (value - sinc).abs(),
        error_estimate: err,
    })
}

/// Normalized kernel against `sin(pi(x2 - x1))/(pi(x2 - x1))` on a list of
/// rescaled point pairs.
pub fn sine_limit_report(
    e: f64,
    t: f64,
    y: &[f64],
    pairs: &[(f64, f64)],
    params: &ContourParams,
) -> Result<Vec<SineRow>> {
    if !(e.abs() < 2.0 * (1.0 + t).sqrt()) {
        return Err(Error::Argument(format!("E = {e} is outside the bulk")));
    }
    pairs
        .iter()
        .map(|&(x1, x2)| symmetric_normalized(e, t, y, x1, x2, params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbm::qt_kernel;

    fn heat(x: f64, y: f64, var: f64) -> f64 {
        (-(x - y) * (x - y) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
    }

    #[test]
    fn rho_t_reductions() {
        for e in [-1.5, 0.0, 0.7] {
            assert_eq!(rho_t(e, 0.0), rho_sc(e));
        }
        assert_eq!(rho_t(2.0 * 1.5 + 0.01, 0.5), 0.0);
        let mass = crate::quad::integrate(|e| rho_t(e, 0.5), -2.0 * 1.5f64.sqrt(), 2.0 * 1.5f64.sqrt(), 400, 16);
        assert!((mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn h_small_tau_limit() {
        let w = C64::new(0.3, 0.8);
        let lim = -(w - 0.1) / (0.5 * 0.3);
        assert!((h_n(w, 0.1, 1e-8, 0.5, 0.3) - lim).norm() < 1e-6);
        assert!((h_n(w, 0.1, 0.0, 0.5, 0.3) - lim).norm() < 1e-15);
    }

    #[test]
    fn g_hand_value() {
        let (u, r, t) = (0.2, 0.4, 0.7);
        let z = C64::new(u, 0.0);
        let w = C64::new(r + 1.0, 0.0);
        let want = (1.0 / t) * ((w - r + z - u) / (w - r)) - (0.0 - r) / ((w - 0.0) * (z - 0.0) * (w - r));
        assert!((g_n(z, w, u, r, t, &[0.0]) - want).norm() < 1e-14);
        assert!((g_n(z, w, u, r, t, &[0.0]) - (1.0 / t - (-r) / ((w) * (z)))).norm() < 1e-14);
    }

    #[test]
    fn f_reflection() {
        let y = [-0.5, 0.1, 0.9];
        let z = C64::new(0.3, 0.2);
        let a = f_n(z.conj(), 0.1, 0.5, &y);
        let b = f_n(z, 0.1, 0.5, &y).conj();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn single_eigenvalue_is_heat_kernel() {
        let t = 0.5;
        let y = vec![0.2];
        for x in [-0.6, 0.0, 0.2, 0.9] {
            let q = KernelQuery::new(x, x, 0.0, t, y.clone(), 1.0).unwrap();
            let p = ContourParams {
                kappa: 0.05,
                ..ContourParams::defaults(0.0, t, 1)
            };
            let k = k_tn(&q, &p).unwrap();
            let want = heat(x, 0.2, t);
            assert!((k.raw.re - want).abs() < 1e-6, "x={x}: {} vs {want}", k.raw);
            assert!(k.raw.im.abs() < 1e-6 * want);
        }
    }

    #[test]
    fn two_point_determinant_is_qt() {
        let t = 0.3;
        let y = vec![-1.0, 1.0];
        let p = ContourParams {
            kappa: 0.1,
            r: 0.1,
            ..ContourParams::defaults(0.0, t, 2)
        };
        for (x1, x2) in [(-0.8, 0.9), (-1.2, -0.4), (0.1, 0.5)] {
            let k = |a: f64, b: f64| {
                k_tn(&KernelQuery::new(a, b, 0.0, t, y.clone(), 1.0).unwrap(), &p)
                    .unwrap()
                    .raw
            };
            let det = k(x1, x1) * k(x2, x2) - k(x1, x2) * k(x2, x1);
            let want = qt_kernel(&[x1, x2], &y, t).unwrap();
            assert!((det.re - want).abs() < 1e-6 * want.max(1e-3), "{det} vs {want}");
        }
    }

    #[test]
    fn r_changes_only_by_gauge() {
        let t = 0.5;
        let y: Vec<f64> = crate::semicircle::semicircle_quantiles(10);
        let base = ContourParams::defaults(0.05, t, 10);
        let shifted = ContourParams { r: base.r + 0.5, ..base };
        let a = symmetric_normalized(0.05, t, &y, 0.0, 0.7, &base).unwrap();
        let b = symmetric_normalized(0.05, t, &y, 0.0, 0.7, &shifted).unwrap();
        assert!((a.normalized - b.normalized).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_contours() {
        let y = vec![0.0, 0.5];
        let p = ContourParams::defaults(0.0, 0.5, 2);
        let q = KernelQuery::new(0.1, 0.1, 0.0, 0.5, y.clone(), 0.3).unwrap();
        assert!(matches!(k_tn(&q, &p), Err(Error::Contour(_))));
        let p = ContourParams {
            kappa: 0.25,
            nodes: 32,
            ..p
        };
        assert!(matches!(k_tn(&q, &p), Err(Error::Contour(_))));
        assert!(KernelQuery::new(0.0, 0.0, 0.0, 0.5, vec![9.0], 0.3).is_err());
    }
}
