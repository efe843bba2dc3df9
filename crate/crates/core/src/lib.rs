//! Hermitian Wigner matrices: sampling, spectra, resolvents, local
//! statistics, Dyson Brownian motion and the Gaussian-convolution kernel.
//!
//! Everything numeric is generic over [`scalar::Real`] (`f32` or `f64`).
//! The aliases below fix `f64`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dbm;
pub mod deloc;
pub mod ensemble;
pub mod error;
pub mod grid;
pub mod jkernel;
pub mod localstats;
pub mod matrix;
pub mod mc;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod selftest;
pub mod semicircle;
pub mod spectral;
pub mod stats;
pub mod stieltjes;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type Matrix = matrix::HermitianMatrix<f64>;
pub type UnitaryMatrix = matrix::ComplexMatrix<f64>;
pub type Decomposition = spectral::SpectralDecomposition<f64>;
pub type Density = grid::DensityGrid<f64>;
pub type Complex64 = num_complex::Complex<f64>;
