//! Independent maximum-likelihood solver and dense brute-force evaluators.
//!
//! The evidence, maximized over `(alpha, beta)` at any fixed degrees of
//! freedom, reduces to a one-dimensional problem in the ridge ratio
//! `gamma = beta / alpha`:
//!
//! ```text
//! min over gamma:  m ln( sum_i ybar_i^2 / (1 + lambda_i gamma) + r )
//!                  + sum_i ln(1 + lambda_i gamma)
//! beta(gamma) = m / ( sum_i ybar_i^2 / (1 + lambda_i gamma) + r )
//! ```
//!
//! where `lambda_i` are the nonzero eigenvalues shared by the two gram
//! matrices, `ybar_i^2` the squared target projections onto the matching
//! eigenvectors, and `r` the projection mass left in the null space. The
//! reduction never references the degrees of freedom, so its solution is the
//! ground truth the EM fixed points are verified against for every `nu`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::data::{DesignMatrix, Precompute};
use crate::error::{Error, Result};
use crate::model::Nu;
use crate::special::ln_gamma;

const GRID_POINTS: usize = 256;
const GAMMA_LO: f64 = 1e-12;
const GAMMA_HI: f64 = 1e12;
const REFINE_REL_WIDTH: f64 = 1e-10;

/// Target projections onto the eigenbasis of `Phi PhiT`, computed without any
/// m x m work: the nonzero eigenvalues coincide with the gram eigenvalues and
/// the corresponding eigenvectors are `Phi v_j / sqrt(d_j)`.
#[derive(Debug, Clone)]
pub struct SpectrumProjection {
    /// Nonzero eigenvalues (descending).
    pub lambdas: Vec<f64>,
    /// Squared projections of the targets onto the matching eigenvectors.
    pub ybar_sq: Vec<f64>,
    /// Squared target mass in the null space, i.e. on the zero eigenvalues.
    pub residual_sq: f64,
}

/// Where [`ml_solve`] found its optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaBoundary {
    Interior,
    /// Optimum at `gamma = 0` (targets orthogonal to the column space).
    Lower,
    /// Optimum pinned at the top of the search range.
    Upper,
}

/// Maximum-likelihood solution of the one-dimensional reduction.
#[derive(Debug, Clone, Copy)]
pub struct GammaSolution {
    /// Ridge ratio beta / alpha at the optimum.
    pub gamma: f64,
    pub beta: f64,
    /// `beta / gamma`; infinite at the `gamma = 0` boundary.
    pub alpha: f64,
    /// Objective value at `gamma`.
    pub objective: f64,
    pub boundary: GammaBoundary,
}

/// Projects the cached spectrum into the quantities the reduction needs.
/// Eigenvalues below `1e-12 * max(D)` count as zero and their target mass is
/// folded into `residual_sq`.
pub fn project_spectrum(pre: &Precompute) -> SpectrumProjection {
    let max_d = pre.d.iter().fold(0.0_f64, |a, &b| a.max(b));
    let cutoff = 1e-12 * max_d;
    let mut lambdas = Vec::new();
    let mut ybar_sq = Vec::new();
    let mut captured = 0.0;
    for (&d, &ypv) in pre.d.iter().zip(pre.y_pv.iter()) {
        if d > cutoff && d > 0.0 {
            let yb = ypv * ypv / d;
            lambdas.push(d);
            ybar_sq.push(yb);
            captured += yb;
        }
    }
    let residual_sq = (pre.y_norm_sq - captured).max(0.0);
    SpectrumProjection {
        lambdas,
        ybar_sq,
        residual_sq,
    }
}

fn weighted_projection_sum(sp: &SpectrumProjection, gamma: f64) -> f64 {
    let mut s = sp.residual_sq;
    for (&l, &yb) in sp.lambdas.iter().zip(&sp.ybar_sq) {
        s += yb / (1.0 + l * gamma);
    }
    s
}

/// The reduced negative log-likelihood (up to constants) at `gamma`.
pub fn gamma_objective(sp: &SpectrumProjection, n_obs: usize, gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::Domain(format!(
            "gamma must be non-negative, got {gamma}"
        )));
    }
    let s = weighted_projection_sum(sp, gamma);
    if s <= 0.0 {
        return Err(Error::Domain(
            "objective undefined: targets are zero".into(),
        ));
    }
    let mut log_det = 0.0;
    for &l in &sp.lambdas {
        log_det += (l * gamma).ln_1p();
    }
    Ok(n_obs as f64 * s.ln() + log_det)
}

/// The stationary noise precision at a given `gamma`:
/// `beta = m / (sum_i ybar_i^2 / (1 + lambda_i gamma) + r)`.
pub fn beta_from_gamma(sp: &SpectrumProjection, n_obs: usize, gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::Domain(format!(
            "gamma must be non-negative, got {gamma}"
        )));
    }
    let s = weighted_projection_sum(sp, gamma);
    if s <= 0.0 {
        return Err(Error::Domain("beta undefined: targets are zero".into()));
    }
    Ok(n_obs as f64 / s)
}

/// Minimizes the reduced objective: a 256-point logarithmic grid scan over
/// `[1e-12, 1e12]` followed by golden-section refinement of the best cell to
/// relative width 1e-10. Unimodality is not assumed; the returned value is
/// never worse than the best grid point.
pub fn ml_solve(sp: &SpectrumProjection, n_obs: usize) -> Result<GammaSolution> {
    if sp.lambdas.is_empty() {
        return Err(Error::Degenerate(
            "no positive eigenvalues in the design".into(),
        ));
    }
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| GAMMA_LO * (GAMMA_HI / GAMMA_LO).powf(i as f64 / (GRID_POINTS - 1) as f64))
        .collect();
    let mut values = Vec::with_capacity(GRID_POINTS);
    for &g in &grid {
        values.push(gamma_objective(sp, n_obs, g)?);
    }
    let (mut lo_val, mut hi_val) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        lo_val = lo_val.min(v);
        hi_val = hi_val.max(v);
        if v < values[best] {
            best = i;
        }
    }
    if hi_val - lo_val <= 1e-12 * (1.0 + hi_val.abs()) {
        return Err(Error::Degenerate(
            "objective is flat across the gamma grid; the likelihood does not identify gamma"
                .into(),
        ));
    }

    let at_zero = gamma_objective(sp, n_obs, 0.0)?;
    if at_zero <= values[best] {
        let beta = beta_from_gamma(sp, n_obs, 0.0)?;
        return Ok(GammaSolution {
            gamma: 0.0,
            beta,
            alpha: f64::INFINITY,
            objective: at_zero,
            boundary: GammaBoundary::Lower,
        });
    }

    let (mut gamma, mut objective) = if best == 0 {
        // the minimum may sit below the grid floor; bracket from zero linearly
        golden_min(
            |g| gamma_objective(sp, n_obs, g),
            0.0,
            grid[1],
            REFINE_REL_WIDTH * grid[1],
        )?
    } else {
        let left = grid[best - 1].ln();
        let right = grid[(best + 1).min(GRID_POINTS - 1)].ln();
        let (u, v) = golden_min(
            |u| gamma_objective(sp, n_obs, u.exp()),
            left,
            right,
            REFINE_REL_WIDTH,
        )?;
        (u.exp(), v)
    };
    if objective > values[best] {
        gamma = grid[best];
        objective = values[best];
    }

    let boundary = if best == GRID_POINTS - 1 {
        GammaBoundary::Upper
    } else if gamma <= GAMMA_LO {
        GammaBoundary::Lower
    } else {
        GammaBoundary::Interior
    };
    let beta = beta_from_gamma(sp, n_obs, gamma)?;
    Ok(GammaSolution {
        gamma,
        beta,
        alpha: beta / gamma,
        objective,
        boundary,
    })
}

fn golden_min<F: Fn(f64) -> Result<f64>>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    width: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..1000 {
        if hi - lo <= width {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok((mid, f(mid)?))
}

/// Log-evidence evaluated the slow, unarguable way: build
/// `B = beta^-1 I + alpha^-1 Phi PhiT` densely and use an explicit Cholesky
/// factorization for the determinant and the quadratic form.
pub fn brute_evidence(
    phi: &DesignMatrix,
    y: &DVector<f64>,
    nu: Nu,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    let m = phi.n_obs();
    if m > 200 {
        return Err(Error::Unsupported(format!(
            "brute-force evidence builds an m x m matrix; m={m} exceeds 200"
        )));
    }
    if y.len() != m {
        return Err(Error::Dimension {
            what: "targets",
            expected: m,
            found: y.len(),
        });
    }
    assert!(alpha > 0.0 && beta > 0.0, "precisions must be positive");
    let b = DMatrix::identity(m, m) / beta + (&phi.phi * phi.phi.transpose()) / alpha;
    let chol = Cholesky::new(b)
        .ok_or_else(|| Error::Singular("covariance B is not positive definite".into()))?;
    let mut ln_det = 0.0;
    for i in 0..m {
        ln_det += 2.0 * chol.l_dirty()[(i, i)].ln();
    }
    let yby = y.dot(&chol.solve(y));
    let mf = m as f64;
    Ok(match nu {
        Nu::Infinite => -0.5 * mf * (2.0 * std::f64::consts::PI).ln() - 0.5 * ln_det - 0.5 * yby,
        Nu::Finite(v) => {
            ln_gamma(0.5 * (v + mf))
                - ln_gamma(0.5 * v)
                - 0.5 * mf * (v * std::f64::consts::PI).ln()
                - 0.5 * ln_det
                - 0.5 * (v + mf) * (yby / v).ln_1p()
        }
    })
}
