//! The regression model: posterior quantities, log-evidence, and the
//! expectation-maximization fit loop, all in eigen-spectrum form.
//!
//! Weights carry a zero-mean prior with precision `alpha`; observation noise
//! has precision `beta`. With finite degrees of freedom `nu` the two are
//! coupled through a heavy-tailed joint and every distribution in play is
//! Student-t:
//!
//! ```text
//! w | y  ~  St(mu, C, nu + m)
//! mu     =  (PhiT Phi + (alpha/beta) I)^-1 PhiT y
//! C      =  cov_scale * (alpha I + beta PhiT Phi)^-1
//! cov_scale = (nu + yT B^-1 y) / (nu + m),   B = beta^-1 I + alpha^-1 Phi PhiT
//! ```
//!
//! At `nu = inf` the scale factor is exactly 1 and the model reduces to the
//! Gaussian case. Each fit iteration computes the posterior moments through
//! the cached spectrum of `PhiT Phi`, then re-estimates `(alpha, beta)` from
//! the expected weight and residual norms; the update keeps both strictly
//! positive.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::data::{DesignMatrix, Precompute};
use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Smallest admissible finite degrees of freedom.
///
/// Below this the covariance scale degenerates to `yBy / m` and the
/// log-evidence gamma terms lose meaning faster than they gain accuracy.
pub const NU_MIN: f64 = 1e-12;

/// Degrees of freedom of the weight prior. `Infinite` is a first-class
/// sentinel selecting the Gaussian model exactly — no large-nu limits are
/// taken in floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nu {
    Finite(f64),
    Infinite,
}

impl Nu {
    pub fn finite(value: f64) -> Result<Self> {
        if !value.is_finite() || value < NU_MIN {
            return Err(Error::Domain(format!(
                "degrees of freedom must be finite and >= {NU_MIN}, got {value}"
            )));
        }
        Ok(Nu::Finite(value))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Nu::Infinite)
    }

    /// Numeric value; `f64::INFINITY` for the Gaussian sentinel.
    pub fn value(self) -> f64 {
        match self {
            Nu::Finite(v) => v,
            Nu::Infinite => f64::INFINITY,
        }
    }
}

impl std::str::FromStr for Nu {
    type Err = Error;

    /// Accepts the literal token `inf` (any case) or a positive number.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("+inf") {
            return Ok(Nu::Infinite);
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_infinite() && v > 0.0 => Ok(Nu::Infinite),
            Ok(v) => Nu::finite(v),
            Err(_) => Err(Error::Domain(format!(
                "cannot parse degrees of freedom from {s:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Nu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Nu::Finite(v) => write!(f, "{v}"),
            Nu::Infinite => write!(f, "inf"),
        }
    }
}

// JSON cannot hold an IEEE infinity, so the Gaussian sentinel round-trips as
// the string "inf" while finite values stay plain numbers.
impl Serialize for Nu {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Nu::Finite(v) => serializer.serialize_f64(*v),
            Nu::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Nu {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Nu::finite(v).map_err(D::Error::custom),
            Repr::Str(s) => s.parse::<Nu>().map_err(D::Error::custom),
        }
    }
}

/// The three hyperparameters of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub nu: Nu,
    pub alpha: f64,
    pub beta: f64,
}

impl Hyperparams {
    pub fn new(nu: Nu, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain(format!(
                "precisions must be finite and positive, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self { nu, alpha, beta })
    }
}

/// Posterior moments evaluated at one `(nu, alpha, beta)` point.
#[derive(Debug, Clone)]
pub struct PosteriorSummary {
    /// Posterior mean of the weights.
    pub mu: DVector<f64>,
    /// The quadratic form yT B^-1 y.
    pub yby: f64,
    /// (nu + yby) / (nu + m); exactly 1 for the Gaussian model.
    pub cov_scale: f64,
    /// Trace of the posterior covariance C.
    pub tr_c: f64,
    /// Trace of PhiT Phi C.
    pub tr_phitphi_c: f64,
    /// Squared residual norm ||y - Phi mu||^2.
    pub resid_sq: f64,
}

/// Sufficient statistics feeding the M-step: expected squared weight norm and
/// expected squared residual, both strictly positive.
#[derive(Debug, Clone, Copy)]
pub struct EStepStats {
    pub b: f64,
    pub c: f64,
}

/// Fit-loop settings.
#[derive(Debug, Clone, Copy)]
pub struct FitConfig {
    /// Relative change below which both precisions count as converged.
    pub rel_tol: f64,
    pub max_iter: usize,
    pub alpha0: f64,
    pub beta0: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            max_iter: 10_000,
            alpha0: 1.0,
            beta0: 1.0,
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Domain(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        if !(self.alpha0 > 0.0 && self.beta0 > 0.0) {
            return Err(Error::Domain(format!(
                "initial precisions must be positive, got alpha0={}, beta0={}",
                self.alpha0, self.beta0
            )));
        }
        Ok(())
    }
}

/// One row of the per-iteration fit history.
#[derive(Debug, Clone, Copy)]
pub struct TracePoint {
    pub iteration: usize,
    pub alpha: f64,
    pub beta: f64,
    pub log_evidence: f64,
}

/// Outcome of [`fit_qem`]. `iterations` counts M-step updates executed, the
/// quantity benchmarks tabulate as `cnt`.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub hyperparams: Hyperparams,
    pub mu: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

#[inline]
fn check_precisions(alpha: f64, beta: f64) {
    assert!(
        alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0,
        "precisions must be finite and positive, got alpha={alpha}, beta={beta}"
    );
}

/// Posterior mean through the cached spectrum:
/// `V (D + (alpha/beta) I)^-1 VT PhiT y`, the ridge solution with penalty
/// `alpha/beta`. Cost O(M^2).
pub fn posterior_mean(pre: &Precompute, alpha: f64, beta: f64) -> DVector<f64> {
    check_precisions(alpha, beta);
    let ratio = alpha / beta;
    let w = DVector::from_iterator(
        pre.n_basis,
        pre.y_pv
            .iter()
            .zip(pre.d.iter())
            .map(|(&ypv, &d)| ypv / (d + ratio)),
    );
    &pre.v * w
}

/// The quadratic form `yT B^-1 y = beta (||y||^2 - y_pT mu)` with
/// `B = beta^-1 I + alpha^-1 Phi PhiT`. Requires `mu` computed from the same
/// precompute and precisions; a result below the rounding slack signals
/// inconsistent inputs.
pub fn quad_form_yby(pre: &Precompute, mu: &DVector<f64>, beta: f64) -> Result<f64> {
    let raw = beta * (pre.y_norm_sq - pre.y_p.dot(mu));
    if raw < -1e-8 * beta * pre.y_norm_sq {
        return Err(Error::Inconsistent(format!(
            "yT B^-1 y evaluated to {raw:.6e}; mu does not match this precompute"
        )));
    }
    Ok(raw.max(0.0))
}

/// Covariance scale and the two traces the M-step needs, each O(M):
/// `tr C = cov_scale * sum_i (alpha + beta d_i)^-1` and
/// `tr PhiT Phi C = cov_scale * sum_i d_i (alpha + beta d_i)^-1`.
pub fn posterior_cov_traces(
    pre: &Precompute,
    nu: Nu,
    alpha: f64,
    beta: f64,
    yby: f64,
) -> (f64, f64, f64) {
    check_precisions(alpha, beta);
    debug_assert!(yby >= 0.0);
    let cov_scale = match nu {
        Nu::Infinite => 1.0,
        Nu::Finite(v) => (v + yby) / (v + pre.n_obs as f64),
    };
    let mut tr_a = 0.0;
    let mut tr_da = 0.0;
    for &d in pre.d.iter() {
        let denom = alpha + beta * d;
        tr_a += 1.0 / denom;
        tr_da += d / denom;
    }
    (cov_scale, cov_scale * tr_a, cov_scale * tr_da)
}

/// `||y - Phi mu||^2` expanded as `||y||^2 - 2 y_pT mu + ||Phi mu||^2`,
/// clamped at zero against rounding.
pub fn residual_norm_sq(pre: &Precompute, phi: &DesignMatrix, mu: &DVector<f64>) -> f64 {
    let fitted = &phi.phi * mu;
    let raw = pre.y_norm_sq - 2.0 * pre.y_p.dot(mu) + fitted.norm_squared();
    debug_assert!(
        raw >= -1e-8 * pre.y_norm_sq,
        "residual {raw} below rounding slack"
    );
    raw.max(0.0)
}

/// Expectation step: posterior moments at `(alpha, beta)` plus the two
/// sufficient statistics `b = ||mu||^2 + tr C` and
/// `c = ||y - Phi mu||^2 + tr PhiT Phi C`.
pub fn e_step(
    pre: &Precompute,
    phi: &DesignMatrix,
    nu: Nu,
    alpha: f64,
    beta: f64,
) -> Result<(PosteriorSummary, EStepStats)> {
    let mu = posterior_mean(pre, alpha, beta);
    let yby = quad_form_yby(pre, &mu, beta)?;
    let (cov_scale, tr_c, tr_phitphi_c) = posterior_cov_traces(pre, nu, alpha, beta, yby);
    let resid_sq = residual_norm_sq(pre, phi, &mu);
    let b = mu.norm_squared() + tr_c;
    let c = resid_sq + tr_phitphi_c;
    let positive = |v: f64| v.is_finite() && v > 0.0;
    if !positive(b) || !positive(c) {
        return Err(Error::Degenerate(format!(
            "E-step statistics collapsed (b={b}, c={c}); targets and design are both zero"
        )));
    }
    Ok((
        PosteriorSummary {
            mu,
            yby,
            cov_scale,
            tr_c,
            tr_phitphi_c,
            resid_sq,
        },
        EStepStats { b, c },
    ))
}

/// Maximization step: `alpha = M / b`, `beta = m / c`.
pub fn m_step(stats: &EStepStats, n_basis: usize, n_obs: usize) -> (f64, f64) {
    assert!(
        stats.b > 0.0 && stats.c > 0.0,
        "m_step requires positive statistics"
    );
    (n_basis as f64 / stats.b, n_obs as f64 / stats.c)
}

/// Log marginal likelihood of the targets at `(nu, alpha, beta)`.
///
/// `ln|B|` uses the spectrum of `Phi PhiT`: the M gram eigenvalues padded
/// with `m - M` zeros, so the whole evaluation stays O(M^2).
pub fn log_evidence(pre: &Precompute, nu: Nu, alpha: f64, beta: f64) -> f64 {
    check_precisions(alpha, beta);
    let m = pre.n_obs as f64;
    let mu = posterior_mean(pre, alpha, beta);
    let yby = quad_form_yby(pre, &mu, beta).expect("mu from the same precompute");
    let mut ln_det_b = (m - pre.n_basis as f64) * (1.0 / beta).ln();
    for &d in pre.d.iter() {
        ln_det_b += (1.0 / beta + d / alpha).ln();
    }
    let half = 0.5;
    match nu {
        Nu::Infinite => {
            -half * m * (2.0 * std::f64::consts::PI).ln() - half * ln_det_b - half * yby
        }
        Nu::Finite(v) => {
            ln_gamma(half * (v + m))
                - ln_gamma(half * v)
                - half * m * (v * std::f64::consts::PI).ln()
                - half * ln_det_b
                - half * (v + m) * (yby / v).ln_1p()
        }
    }
}

/// Runs the EM loop from `(alpha0, beta0)` until both precisions change by
/// less than `rel_tol` in relative terms, or `max_iter` updates have run.
///
/// Non-convergence is not an error: the result comes back with
/// `converged = false` and the trace still records every iterate. The final
/// posterior mean is recomputed at the returned `(alpha, beta)`.
pub fn fit_qem(
    pre: &Precompute,
    phi: &DesignMatrix,
    nu: Nu,
    config: &FitConfig,
) -> Result<FitResult> {
    config.validate()?;
    let mut alpha = config.alpha0;
    let mut beta = config.beta0;
    let mut trace = Vec::with_capacity(64);
    trace.push(TracePoint {
        iteration: 0,
        alpha,
        beta,
        log_evidence: log_evidence(pre, nu, alpha, beta),
    });
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=config.max_iter {
        let (_, stats) = e_step(pre, phi, nu, alpha, beta)?;
        let (alpha_new, beta_new) = m_step(&stats, pre.n_basis, pre.n_obs);
        iterations = k;
        trace.push(TracePoint {
            iteration: k,
            alpha: alpha_new,
            beta: beta_new,
            log_evidence: log_evidence(pre, nu, alpha_new, beta_new),
        });
        let done = (alpha_new - alpha).abs() / alpha_new < config.rel_tol
            && (beta_new - beta).abs() / beta_new < config.rel_tol;
        alpha = alpha_new;
        beta = beta_new;
        if done {
            converged = true;
            break;
        }
    }
    let mu = posterior_mean(pre, alpha, beta);
    Ok(FitResult {
        hyperparams: Hyperparams { nu, alpha, beta },
        mu,
        iterations,
        converged,
        trace,
    })
}

/// Point predictions `phi_new * mu`. Rows of `phi_new` must already be
/// normalized with the training statistics.
pub fn predict(mu: &DVector<f64>, phi_new: &DMatrix<f64>) -> Result<DVector<f64>> {
    if phi_new.ncols() != mu.len() {
        return Err(Error::Dimension {
            what: "prediction features",
            expected: mu.len(),
            found: phi_new.ncols(),
        });
    }
    Ok(phi_new * mu)
}

/// Dense posterior for small M, used to cross-check the spectral path:
/// `A = (alpha I + beta PhiT Phi)^-1`, `mu = beta A PhiT y`,
/// `C = cov_scale * A`. Works straight from the design matrix, not the
/// eigendecomposition.
pub fn posterior_dense(
    pre: &Precompute,
    phi: &DesignMatrix,
    nu: Nu,
    alpha: f64,
    beta: f64,
) -> Result<(DVector<f64>, DMatrix<f64>, DMatrix<f64>)> {
    check_precisions(alpha, beta);
    let n = phi.n_basis();
    let gram = phi.phi.tr_mul(&phi.phi);
    let s = DMatrix::identity(n, n) * alpha + gram * beta;
    let chol = Cholesky::new(s).ok_or_else(|| {
        Error::Singular("alpha I + beta PhiT Phi is not positive definite".into())
    })?;
    let a = chol.inverse();
    let mu = &a * &pre.y_p * beta;
    let yby = (beta * (pre.y_norm_sq - pre.y_p.dot(&mu))).max(0.0);
    let cov_scale = match nu {
        Nu::Infinite => 1.0,
        Nu::Finite(v) => (v + yby) / (v + pre.n_obs as f64),
    };
    let c = &a * cov_scale;
    Ok((mu, a, c))
}
