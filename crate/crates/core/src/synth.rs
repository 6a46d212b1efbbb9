//! Synthetic regression data drawn from the generative model.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xorshift::XorShiftRng;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Samples a dataset from the model: standard-normal features, weights from
/// `N(0, 1/alpha)`, targets `y = X w + eps` with `eps ~ N(0, 1/beta)`.
/// Deterministic for a fixed seed.
pub fn generate(
    n_rows: usize,
    n_features: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
) -> Result<Dataset> {
    if n_features < 1 || n_rows <= n_features {
        return Err(Error::Domain(format!(
            "synthetic data needs m > M >= 1, got m={n_rows}, M={n_features}"
        )));
    }
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::Domain(format!(
            "generative precisions must be positive and finite, got alpha={alpha}, beta={beta}"
        )));
    }
    let mut rng = XorShiftRng::seed_from_u64(seed);
    let mut features = DMatrix::zeros(n_rows, n_features);
    for i in 0..n_rows {
        for j in 0..n_features {
            features[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    let mut weights = DVector::zeros(n_features);
    for j in 0..n_features {
        let z: f64 = StandardNormal.sample(&mut rng);
        weights[j] = z / alpha.sqrt();
    }
    let mut targets: DVector<f64> = &features * weights;
    for i in 0..n_rows {
        let z: f64 = StandardNormal.sample(&mut rng);
        targets[i] += z / beta.sqrt();
    }
    let names = (1..=n_features).map(|j| format!("x{j}")).collect();
    Dataset::new(features, targets, Some(names))
}
