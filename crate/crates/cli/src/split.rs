//! Seeded row shuffling and contiguous fold assignment for the benchmark.

use blrs_core::{Error, Result};
use rand::{RngCore, SeedableRng};
use rand_xorshift::XorShiftRng;

/// One cross-validation split: rows shuffled by `seed`, cut into `folds`
/// contiguous parts; `trial` (1-based) names the held-out part.
#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    pub folds: usize,
    pub seed: u64,
    pub trial: usize,
}

impl SplitSpec {
    pub fn validate(&self, n_rows: usize) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::Domain(format!(
                "folds must be >= 2, got {}",
                self.folds
            )));
        }
        if self.trial < 1 || self.trial > self.folds {
            return Err(Error::Domain(format!(
                "trial must be in 1..={}, got {}",
                self.folds, self.trial
            )));
        }
        if n_rows < self.folds + 2 {
            return Err(Error::Domain(format!(
                "dataset with {n_rows} rows is too small for a {}-fold split",
                self.folds
            )));
        }
        Ok(())
    }

    /// Row indices of the training portion (everything but the held-out part).
    pub fn training_rows(&self, n_rows: usize) -> Vec<usize> {
        let order = shuffled_indices(n_rows, self.seed);
        let base = n_rows / self.folds;
        let extra = n_rows % self.folds;
        let mut start = 0;
        for t in 1..self.trial {
            start += base + usize::from(t <= extra);
        }
        let len = base + usize::from(self.trial <= extra);
        let mut train: Vec<usize> = Vec::with_capacity(n_rows - len);
        train.extend_from_slice(&order[..start]);
        train.extend_from_slice(&order[start + len..]);
        train
    }
}

/// Fisher-Yates shuffle of `0..n` driven by a seeded xorshift generator.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = XorShiftRng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    order
}
