//! Functions sampled on uniform grids.

use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real (possibly signed) function on the uniform grid `x_i = x0 + i dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn<T> {
    pub x0: T,
    pub dx: T,
    pub values: Vec<T>,
}

impl<T: Real> GridFn<T> {
    pub fn from_fn(x0: T, dx: T, len: usize, f: impl Fn(T) -> T) -> Self {
        let values = (0..len)
            .map(|i| f(x0 + dx * T::from_usize_lossy(i)))
            .collect();
        Self { x0, dx, values }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        self.x0 + self.dx * T::from_usize_lossy(i)
    }

    /// Riemann sum `sum f_i dx`; spectrally accurate for smooth functions
    /// that vanish at both ends.
    pub fn integral(&self) -> T {
        self.values.iter().copied().sum::<T>() * self.dx
    }

    pub fn l1_norm(&self) -> T {
        self.values.iter().map(|v| v.abs()).sum::<T>() * self.dx
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `self - other` on an identical grid.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() || self.x0 != other.x0 || self.dx != other.dx {
            return Err(Error::Dimension("grids differ".into()));
        }
        Ok(Self {
            x0: self.x0,
            dx: self.dx,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| *a - *b)
                .collect(),
        })
    }

    /// Fraction of `|f|` mass in the outer 5% of cells on either side.
    pub fn edge_mass(&self) -> T {
        let n = self.len();
        let k = (n / 20).max(1).min(n);
        let total = self.values.iter().map(|v| v.abs()).sum::<T>();
        if total == T::zero() {
            return T::zero();
        }
        let edge: T = self.values[..k]
            .iter()
            .chain(&self.values[n - k..])
            .map(|v| v.abs())
            .sum();
        edge / total
    }
}

/// Probability density on a uniform grid, normalized so `sum v_i dx = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid<T>(GridFn<T>);

impl<T: Real> DensityGrid<T> {
    /// Validates and normalizes. Values must be finite and nonnegative with
    /// positive total mass.
    pub fn new(x0: T, dx: T, values: Vec<T>) -> Result<Self> {
        if !(dx > T::zero()) || !x0.is_finite() {
            return Err(Error::Config("grid spacing must be positive".into()));
        }
        if values.len() < 2 {
            return Err(Error::Config("density grid needs at least two points".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::Config(
                "density values must be finite and nonnegative".into(),
            ));
        }
        let mass = values.iter().copied().sum::<T>() * dx;
        if !(mass > T::zero()) {
            return Err(Error::Config("density has zero mass".into()));
        }
        let values = values.into_iter().map(|v| v / mass).collect();
        Ok(Self(GridFn { x0, dx, values }))
    }

    pub fn from_fn(x0: T, dx: T, len: usize, f: impl Fn(T) -> T) -> Result<Self> {
        let g = GridFn::from_fn(x0, dx, len, f);
        Self::new(g.x0, g.dx, g.values)
    }

    /// Standard normal density on `[-half_width, half_width]`.
    pub fn standard_normal(half_width: T, len: usize) -> Result<Self> {
        let dx = T::lit(2.0) * half_width / T::from_usize_lossy(len);
        let norm = (T::lit(2.0) * T::PI()).sqrt().recip();
        Self::from_fn(-half_width, dx, len, |x| {
            norm * (-x * x / T::lit(2.0)).exp()
        })
    }

    /// Parses `x,density` rows (optional header). The x column must be
    /// uniformly spaced to relative tolerance 1e-6.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let (Some(a), Some(b)) = (parts.next(), parts.next()) else {
                return Err(Error::Config(format!("line {}: expected x,density", lineno + 1)));
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(v)) => {
                    xs.push(x);
                    vs.push(T::lit(v));
                }
                _ if xs.is_empty() => continue, // header
                _ => {
                    return Err(Error::Config(format!(
                        "line {}: cannot parse numbers",
                        lineno + 1
                    )))
                }
            }
        }
        if xs.len() < 2 {
            return Err(Error::Config("density grid needs at least two points".into()));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (i, x) in xs.iter().enumerate() {
            if (x - (xs[0] + dx * i as f64)).abs() > 1e-6 * dx.abs().max(1e-300) {
                return Err(Error::Config("density grid is not uniformly spaced".into()));
            }
        }
        Self::new(T::lit(xs[0]), T::lit(dx), vs)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_csv(&text)
    }

    pub fn as_fn(&self) -> &GridFn<T> {
        &self.0
    }

    pub fn into_fn(self) -> GridFn<T> {
        self.0
    }

    pub fn x0(&self) -> T {
        self.0.x0
    }

    pub fn dx(&self) -> T {
        self.0.dx
    }

    pub fn values(&self) -> &[T] {
        &self.0.values
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mass(&self) -> T {
        self.0.integral()
    }

    pub fn mean(&self) -> T {
        (0..self.len())
            .map(|i| self.0.x(i) * self.0.values[i])
            .sum::<T>()
            * self.0.dx
    }

    pub fn variance(&self) -> T {
        let m = self.mean();
        (0..self.len())
            .map(|i| (self.0.x(i) - m).powi(2) * self.0.values[i])
            .sum::<T>()
            * self.0.dx
    }

    /// Fails when more than `1e-8` of the mass sits in the outer 5% of cells.
    pub fn check_support(&self) -> Result<()> {
        let e = self.0.edge_mass();
        if e > T::lit(1e-8) {
            return Err(Error::Domain(format!(
                "density mass {:.3e} in the outer grid cells; widen the grid",
                e.as_f64()
            )));
        }
        Ok(())
    }
}
