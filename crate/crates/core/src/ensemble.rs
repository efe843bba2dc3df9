//! Wigner and GUE sampling.
//!
//! Entries follow the usual hermitian Wigner normalization: with a
//! standardized draw `Z` (mean 0, variance 1) from the chosen family,
//! off-diagonal real and imaginary parts are `Z / sqrt(2)` and diagonal
//! entries are `Z`, all divided by `sqrt(N)`. The diagonal therefore uses the
//! same family as the off-diagonal parts, rescaled to unit variance.

use std::fmt;
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::DensityGrid;
use crate::matrix::HermitianMatrix;
use crate::rng::RngStream;
use crate::scalar::Real;

/// Inverse-CDF sampler for a density given on a grid.
///
/// The CDF is linear between grid nodes (cell masses by the trapezoid rule),
/// so the sampled law is piecewise uniform. Its exact mean and variance are
/// used to standardize the draws.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSampler {
    source: String,
    x0: f64,
    dx: f64,
    cdf: Vec<f64>,
    mean: f64,
    sd: f64,
}

impl GridSampler {
    pub fn new(grid: &DensityGrid<f64>, source: impl Into<String>) -> Result<Self> {
        let v = grid.values();
        let dx = grid.dx();
        let x0 = grid.x0();
        let masses: Vec<f64> = v.windows(2).map(|w| 0.5 * (w[0] + w[1]) * dx).collect();
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Config("grid law has zero mass".into()));
        }
        let mut cdf = Vec::with_capacity(v.len());
        cdf.push(0.0);
        let (mut m1, mut m2, mut acc) = (0.0, 0.0, 0.0);
        for (i, m) in masses.iter().enumerate() {
            let p = m / total;
            let a = x0 + dx * i as f64;
            let b = a + dx;
            m1 += p * 0.5 * (a + b);
            m2 += p * (a * a + a * b + b * b) / 3.0;
            acc += p;
            cdf.push(acc);
        }
        let var = m2 - m1 * m1;
        if !(var > 0.0) || !var.is_finite() {
            return Err(Error::Config(
                "grid law cannot be normalized to unit variance".into(),
            ));
        }
        Ok(Self {
            source: source.into(),
            x0,
            dx,
            cdf,
            mean: m1,
            sd: var.sqrt(),
        })
    }

    /// Mean of the unstandardized law.
    pub fn raw_mean(&self) -> f64 {
        self.mean
    }

    pub fn raw_sd(&self) -> f64 {
        self.sd
    }

    /// Standardized draw.
    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        let u = rng.uniform() * self.cdf[self.cdf.len() - 1];
        // first node with cdf > u; the cell is the one before it
        let k = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        let x = self.x0 + self.dx * ((k - 1) as f64 + frac);
        (x - self.mean) / self.sd
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LawKind {
    Gaussian,
    /// `Z = +-1`.
    Rademacher,
    /// `Z` uniform on `[-sqrt 3, sqrt 3]`.
    Uniform,
    GridCustom(GridSampler),
}

/// Law of the standardized entry variable.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryLaw {
    pub kind: LawKind,
    /// Declared sub-Gaussian parameter; recorded, not checked.
    pub subgaussian_nu: Option<f64>,
}

impl EntryLaw {
    pub fn gaussian() -> Self {
        Self::from_kind(LawKind::Gaussian)
    }

    pub fn rademacher() -> Self {
        Self::from_kind(LawKind::Rademacher)
    }

    pub fn uniform() -> Self {
        Self::from_kind(LawKind::Uniform)
    }

    pub fn grid(grid: &DensityGrid<f64>, source: impl Into<String>) -> Result<Self> {
        Ok(Self::from_kind(LawKind::GridCustom(GridSampler::new(
            grid, source,
        )?)))
    }

    fn from_kind(kind: LawKind) -> Self {
        Self {
            kind,
            subgaussian_nu: None,
        }
    }

    /// Parses `gaussian`, `rademacher`, `uniform` or `grid:<csv path>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "gaussian" | "gue" => Ok(Self::gaussian()),
            "rademacher" | "bernoulli" => Ok(Self::rademacher()),
            "uniform" => Ok(Self::uniform()),
            other => match other.strip_prefix("grid:") {
                Some(path) => {
                    let g = DensityGrid::load_csv(Path::new(path))?;
                    Self::grid(&g, other)
                }
                None => Err(Error::Config(format!("unknown entry law '{other}'"))),
            },
        }
    }

    /// Whether the law has a density (needed by the average density of states
    /// estimator at very small windows).
    pub fn is_smooth(&self) -> bool {
        matches!(self.kind, LawKind::Gaussian | LawKind::GridCustom(_))
    }

    /// Draw with mean 0 and variance 1.
    #[inline]
    pub fn standard_draw(&self, rng: &mut RngStream) -> f64 {
        match &self.kind {
            LawKind::Gaussian => rng.gaussian(),
            LawKind::Rademacher => rng.sign(),
            LawKind::Uniform => (2.0 * rng.uniform() - 1.0) * 3f64.sqrt(),
            LawKind::GridCustom(s) => s.draw(rng),
        }
    }
}

impl fmt::Display for EntryLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            LawKind::Gaussian => f.write_str("gaussian"),
            LawKind::Rademacher => f.write_str("rademacher"),
            LawKind::Uniform => f.write_str("uniform"),
            LawKind::GridCustom(s) => f.write_str(&s.source),
        }
    }
}

/// Everything needed to reproduce a sampling distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub n: usize,
    pub law: EntryLaw,
    /// Strength of the added GUE component, `H = H0 + sqrt(t) V`.
    pub t: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(n: usize, law: EntryLaw, t: f64, seed: u64) -> Result<Self> {
        let s = Self { n, law, t, seed };
        s.validate()?;
        Ok(s)
    }

    pub fn gue(n: usize, seed: u64) -> Self {
        Self {
            n,
            law: EntryLaw::gaussian(),
            t: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(Error::Config(format!("t must be finite and >= 0, got {}", self.t)));
        }
        Ok(())
    }

    /// `key=value` lines: `n`, `law`, `t`, `seed`.
    pub fn to_config(&self) -> String {
        format!(
            "n={}\nlaw={}\nt={}\nseed={}\n",
            self.n, self.law, self.t, self.seed
        )
    }

    /// Reads `key=value` lines. Blank lines, `#` comments and `[section]`
    /// headers are skipped; missing keys take defaults (law gaussian, t 0,
    /// seed 0) except `n`, which is required.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut n = None;
        let mut law = EntryLaw::gaussian();
        let mut t = 0.0;
        let mut seed = 0;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('[') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got '{line}'")))?;
            let v = v.trim();
            match k.trim() {
                "n" => n = Some(parse_num::<usize>("n", v)?),
                "law" => law = EntryLaw::parse(v)?,
                "t" => t = parse_num::<f64>("t", v)?,
                "seed" => seed = parse_num::<u64>("seed", v)?,
                "nu" => law.subgaussian_nu = Some(parse_num::<f64>("nu", v)?),
                other => return Err(Error::Config(format!("unknown ensemble key '{other}'"))),
            }
        }
        let n = n.ok_or_else(|| Error::Config("missing key 'n'".into()))?;
        Self::new(n, law, t, seed)
    }
}

fn parse_num<N: std::str::FromStr>(key: &str, v: &str) -> Result<N> {
    v.parse()
        .map_err(|_| Error::Config(format!("cannot parse {key}='{v}'")))
}

/// Draws one Wigner matrix; when `spec.t > 0` an independent GUE matrix
/// scaled by `sqrt(t)` is added (no variance renormalization).
pub fn sample_wigner<T: Real>(spec: &EnsembleSpec, stream: &mut RngStream) -> Result<HermitianMatrix<T>> {
    spec.validate()?;
    let h0 = sample_law(spec.n, &spec.law, stream);
    if spec.t > 0.0 {
        let v = sample_gue::<T>(spec.n, stream);
        h0.add_scaled(&v, T::lit(spec.t.sqrt()))
    } else {
        Ok(h0)
    }
}

/// GUE matrix with density proportional to `exp(-N Tr H^2 / 2)`.
pub fn sample_gue<T: Real>(n: usize, stream: &mut RngStream) -> HermitianMatrix<T> {
    sample_law(n, &EntryLaw::gaussian(), stream)
}

fn sample_law<T: Real>(n: usize, law: &EntryLaw, stream: &mut RngStream) -> HermitianMatrix<T> {
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    let off = inv_sqrt_n * std::f64::consts::FRAC_1_SQRT_2;
    HermitianMatrix::from_upper(n, |j, l| {
        if j == l {
            Complex::new(T::lit(law.standard_draw(stream) * inv_sqrt_n), T::zero())
        } else {
            let re = law.standard_draw(stream) * off;
            let im = law.standard_draw(stream) * off;
            Complex::new(T::lit(re), T::lit(im))
        }
    })
}

/// Logarithm of the unnormalized GUE eigenvalue density,
/// `sum_{i<j} 2 ln|mu_i - mu_j| - (N/2) sum mu_j^2`, with `N = mu.len()`.
/// Returns `-inf` when two coordinates coincide.
pub fn gue_joint_density<T: Real>(mu: &[T]) -> T {
    // evaluating on the sorted tuple makes the result exactly permutation invariant
    let mut m = mu.to_vec();
    m.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let n = T::from_usize_lossy(m.len());
    let mut acc = T::zero();
    for i in 0..m.len() {
        for j in (i + 1)..m.len() {
            acc += T::lit(2.0) * (m[j] - m[i]).abs().ln();
        }
    }
    let sq: T = m.iter().map(|x| *x * *x).sum();
    acc - n / T::lit(2.0) * sq
}
