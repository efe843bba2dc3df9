//! Reproducible random streams.
//!
//! Every realization of a Monte Carlo experiment draws from its own stream,
//! identified by `(seed, index)`. Streams are ChaCha20 keystreams keyed by the
//! master seed with the realization index as the 64-bit stream selector, so
//! realization `k` sees the same numbers no matter which worker runs it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    index: u64,
    core: ChaCha20Rng,
    spare: Option<f64>,
}

/// Stream number `index` under master `seed`.
pub fn derive_stream(seed: u64, index: u64) -> RngStream {
    let mut core = ChaCha20Rng::seed_from_u64(seed);
    core.set_stream(index);
    RngStream {
        seed,
        index,
        core,
        spare: None,
    }
}

impl RngStream {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Position in the keystream, counted in 32-bit words.
    pub fn counter(&self) -> u128 {
        self.core.get_word_pos()
    }

    /// A child stream; used when one realization needs several independent
    /// sources (e.g. `H0` and the increments of a path).
    pub fn split(&self, salt: u64) -> RngStream {
        let mixed = self
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .rotate_left(17)
            ^ salt.wrapping_add(0xD1B5_4A32_D192_ED03);
        derive_stream(mixed, self.index)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.core.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
    }

    /// Standard normal draw, Marsaglia polar method. Draws come in pairs; the
    /// second value of each pair is cached.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    /// Fair sign, `+1.0` or `-1.0`.
    #[inline]
    pub fn sign(&mut self) -> f64 {
        if self.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Exponential with unit mean.
    pub fn exponential(&mut self) -> f64 {
        -self.uniform_open().ln()
    }
}
