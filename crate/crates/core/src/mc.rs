//! Deterministic parallel execution of Monte Carlo realizations.
//!
//! Realization `k` always draws from `derive_stream(seed, k)`. Indices are
//! split into contiguous static blocks, one per worker, and results are
//! returned in index order, so any fold over them is independent of the
//! worker count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{derive_stream, RngStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Runner {
    pub seed: u64,
    pub workers: usize,
}

impl Runner {
    pub fn new(seed: u64, workers: usize) -> Self {
        Self {
            seed,
            workers: workers.max(1),
        }
    }

    pub fn sequential(seed: u64) -> Self {
        Self::new(seed, 1)
    }

    /// Runs `f(k, stream_k)` for `k in 0..reps` and returns the results in
    /// index order. The first error (by index) is returned.
    pub fn run<R, F>(&self, reps: usize, f: F) -> Result<Vec<R>>
    where
        R: Send,
        F: Fn(u64, &mut RngStream) -> Result<R> + Sync,
    {
        let work = |range: std::ops::Range<usize>| -> Vec<Result<R>> {
            range
                .map(|k| {
                    let mut s = derive_stream(self.seed, k as u64);
                    f(k as u64, &mut s)
                })
                .collect()
        };
        let workers = self.workers.min(reps.max(1));
        let blocks: Vec<std::ops::Range<usize>> = (0..workers)
            .map(|b| (b * reps / workers)..((b + 1) * reps / workers))
            .collect();
        let parts: Vec<Vec<Result<R>>> = if workers == 1 {
            vec![work(0..reps)]
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
            pool.install(|| blocks.into_par_iter().map(work).collect())
        };
        parts.into_iter().flatten().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let f = |k: u64, s: &mut RngStream| -> Result<(u64, f64)> { Ok((k, s.gaussian())) };
        let a = Runner::new(3, 1).run(37, f).unwrap();
        let b = Runner::new(3, 4).run(37, f).unwrap();
        let c = Runner::new(3, 64).run(37, f).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert!(a.iter().enumerate().all(|(i, (k, _))| *k == i as u64));
    }

    #[test]
    fn first_error_wins() {
        let r = Runner::new(0, 3).run(10, |k, _| {
            if k >= 4 {
                Err(Error::Argument(format!("{k}")))
            } else {
                Ok(k)
            }
        });
        assert_eq!(r, Err(Error::Argument("4".into())));
    }

    #[test]
    fn zero_reps() {
        let r: Vec<u64> = Runner::new(0, 8).run(0, |k, _| Ok(k)).unwrap();
        assert!(r.is_empty());
    }
}
