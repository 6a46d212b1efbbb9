//! Helpers shared by the integration suites: seeded data, the standard
//! degrees-of-freedom sweep, and small dense oracles that stay independent of
//! the spectral code paths they verify.

use blrs_core::*;
use nalgebra::{Cholesky, DMatrix, DVector};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xorshift::XorShiftRng;

/// The degrees-of-freedom sweep used by the benchmarks, smallest first.
pub const SWEEP_NUS: [Nu; 6] = [
    Nu::Finite(1e-8),
    Nu::Finite(1e-5),
    Nu::Finite(1e-2),
    Nu::Finite(10.0),
    Nu::Finite(1e4),
    Nu::Infinite,
];

/// Generation parameters for the desk-scale synthetic datasets.
pub const SYNTH_ROWS: usize = 500;
pub const SYNTH_COLS: usize = 10;
pub const SYNTH_ALPHA: f64 = 1.0;
pub const SYNTH_BETA: f64 = 100.0;

pub fn rng(seed: u64) -> XorShiftRng {
    XorShiftRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut XorShiftRng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_iterator(
        rows,
        cols,
        (0..rows * cols).map(|_| StandardNormal.sample(rng)),
    )
}

pub fn random_vector(rng: &mut XorShiftRng, len: usize) -> DVector<f64> {
    DVector::from_iterator(len, (0..len).map(|_| StandardNormal.sample(rng)))
}

/// Normalized design and precompute for one seeded synthetic dataset.
pub fn synthetic_problem(seed: u64) -> (Precompute, DesignMatrix) {
    let data = synth::generate(SYNTH_ROWS, SYNTH_COLS, SYNTH_ALPHA, SYNTH_BETA, seed)
        .expect("valid generation parameters");
    let (phi, _) = normalize_columns(&data).expect("non-constant columns");
    let pre = precompute(&phi, data.targets()).expect("precompute");
    (pre, phi)
}

/// The two-observation identity-design problem with targets (1, 1); its EM
/// fixed point is (2, 2) for every degrees-of-freedom value, while the
/// one-dimensional likelihood reduction is exactly flat.
pub fn hand_problem() -> (Precompute, DesignMatrix) {
    let phi = DesignMatrix {
        phi: DMatrix::identity(2, 2),
        basis: Basis::Identity,
    };
    let y = DVector::from_vec(vec![1.0, 1.0]);
    let pre = precompute(&phi, &y).expect("precompute");
    (pre, phi)
}

pub fn fit_sweep(pre: &Precompute, phi: &DesignMatrix) -> Vec<FitResult> {
    SWEEP_NUS
        .iter()
        .map(|&nu| fit_qem(pre, phi, nu, &FitConfig::default()).expect("fit"))
        .collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// yT B^-1 y with B built explicitly as an m x m matrix.
pub fn dense_yby(phi: &DMatrix<f64>, y: &DVector<f64>, alpha: f64, beta: f64) -> f64 {
    let m = phi.nrows();
    let b = DMatrix::identity(m, m) / beta + (phi * phi.transpose()) / alpha;
    let chol = Cholesky::new(b).expect("B is positive definite");
    y.dot(&chol.solve(y))
}

/// Ridge solution with penalty alpha/beta via a dense Cholesky solve.
pub fn dense_ridge_solve(
    phi: &DMatrix<f64>,
    y: &DVector<f64>,
    alpha: f64,
    beta: f64,
) -> DVector<f64> {
    let k = phi.ncols();
    let lhs = phi.tr_mul(phi) + DMatrix::identity(k, k) * (alpha / beta);
    Cholesky::new(lhs)
        .expect("ridge system is positive definite")
        .solve(&phi.tr_mul(y))
}

/// Asserts the log-evidence trace never decreases beyond rounding slack.
pub fn assert_evidence_ascent(fit: &FitResult, label: &str) {
    for pair in fit.trace.windows(2) {
        let (prev, next) = (pair[0].log_evidence, pair[1].log_evidence);
        assert!(
            next >= prev - 1e-9 * prev.abs(),
            "{label}: evidence decreased from {prev} to {next} at iteration {}",
            pair[1].iteration
        );
    }
}
