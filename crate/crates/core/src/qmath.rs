//! Deformed exponential/logarithm pair and the divergence built on them.
//!
//! The deformation is controlled by an entropic index `q`; both functions
//! coincide with `exp`/`ln` at `q = 1`. The divergence generalizes
//! Kullback-Leibler (recovered at `q = 1`) and is evaluated here only for
//! one-dimensional densities by composite Simpson quadrature, which is all the
//! property tests need.

use crate::error::{Error, Result};

/// Indices closer to 1 than this are routed to the `q = 1` branch; the
/// `(x^{1-q} - 1)/(1 - q)` form loses all precision there.
const Q_ONE_EPS: f64 = 1e-12;

/// Default quadrature grid for [`tsallis_divergence_1d`] callers.
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Entropic index of the deformed calculus.
///
/// Any finite value is a valid index; divergence evaluation additionally
/// requires `q > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropicIndex(f64);

impl EntropicIndex {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::Domain(format!(
                "entropic index must be finite, got {q}"
            )));
        }
        Ok(Self(q))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// q-exponential: `[1 + (1-q)x]_+^{1/(1-q)}` for `q != 1`, `exp(x)` at `q = 1`.
///
/// The base is clipped at zero before exponentiation. A clipped base together
/// with a negative exponent (`q > 1`) has no finite value and is reported as
/// a domain error.
pub fn q_exp(q: f64, x: f64) -> Result<f64> {
    if !q.is_finite() || !x.is_finite() {
        return Err(Error::Domain(format!(
            "q_exp requires finite arguments, got q={q}, x={x}"
        )));
    }
    if (q - 1.0).abs() <= Q_ONE_EPS {
        return Ok(x.exp());
    }
    let base = (1.0 + (1.0 - q) * x).max(0.0);
    let exponent = 1.0 / (1.0 - q);
    if base == 0.0 && exponent < 0.0 {
        return Err(Error::Domain(format!(
            "q_exp undefined: clipped base with negative exponent (q={q}, x={x})"
        )));
    }
    Ok(base.powf(exponent))
}

/// q-logarithm: `(x^{1-q} - 1)/(1-q)` for `q != 1`, `ln(x)` at `q = 1`.
/// Defined for `x > 0` only.
pub fn q_log(q: f64, x: f64) -> Result<f64> {
    if !q.is_finite() || !x.is_finite() {
        return Err(Error::Domain(format!(
            "q_log requires finite arguments, got q={q}, x={x}"
        )));
    }
    if x <= 0.0 {
        return Err(Error::Domain(format!("q_log requires x > 0, got {x}")));
    }
    if (q - 1.0).abs() <= Q_ONE_EPS {
        return Ok(x.ln());
    }
    Ok((x.powf(1.0 - q) - 1.0) / (1.0 - q))
}

/// A normalized density on a closed interval, evaluated pointwise.
pub struct Density1D {
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    lo: f64,
    hi: f64,
}

impl Density1D {
    /// Wraps `eval` as a density on `[lo, hi]`, checking non-negativity on the
    /// quadrature grid and normalization to 1 within 1e-6.
    pub fn new<F>(eval: F, lo: f64, hi: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!("invalid support [{lo}, {hi}]")));
        }
        let density = Self {
            eval: Box::new(eval),
            lo,
            hi,
        };
        let h = (hi - lo) / (DEFAULT_GRID_POINTS - 1) as f64;
        for i in 0..DEFAULT_GRID_POINTS {
            let x = lo + h * i as f64;
            if density.pdf(x) < -1e-12 {
                return Err(Error::Domain(format!("density is negative at x={x}")));
            }
        }
        let mass = simpson(|x| density.pdf(x), lo, hi, DEFAULT_GRID_POINTS)?;
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::Domain(format!(
                "density integrates to {mass:.8} on [{lo}, {hi}], expected 1"
            )));
        }
        Ok(density)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// Divergence `D_q(p || t)` between densities sharing a support.
///
/// Evaluates `(∫ p^q t^{1-q} - 1)/(q-1)` for `q != 1` and `∫ p ln(p/t)` at
/// `q = 1`, by composite Simpson on a uniform grid of at least `grid_points`
/// nodes. Requires `q > 0`.
pub fn tsallis_divergence_1d(
    p: &Density1D,
    t: &Density1D,
    q: EntropicIndex,
    grid_points: usize,
) -> Result<f64> {
    let q = q.get();
    if q <= 0.0 {
        return Err(Error::Domain(format!("divergence requires q > 0, got {q}")));
    }
    if grid_points < 64 {
        return Err(Error::Domain(format!(
            "grid_points must be >= 64, got {grid_points}"
        )));
    }
    if p.support() != t.support() {
        return Err(Error::Domain(format!(
            "densities must share a support: {:?} vs {:?}",
            p.support(),
            t.support()
        )));
    }
    let (lo, hi) = p.support();
    if (q - 1.0).abs() <= Q_ONE_EPS {
        // KL integrand; p ln(p/t) -> 0 as p -> 0.
        let integrand = |x: f64| {
            let pv = p.pdf(x);
            let tv = t.pdf(x);
            if pv <= 0.0 {
                0.0
            } else {
                pv * (pv / tv).ln()
            }
        };
        simpson(integrand, lo, hi, grid_points)
    } else {
        let integrand = |x: f64| {
            let pv = p.pdf(x);
            let tv = t.pdf(x);
            if pv <= 0.0 {
                0.0
            } else {
                pv.powf(q) * tv.powf(1.0 - q)
            }
        };
        let integral = simpson(integrand, lo, hi, grid_points)?;
        Ok((integral - 1.0) / (q - 1.0))
    }
}

/// Composite Simpson rule on a uniform grid of at least `points` nodes.
/// The node count is bumped by one when needed so the interval count is even.
fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> Result<f64> {
    let intervals = if (points - 1).is_multiple_of(2) {
        points - 1
    } else {
        points
    };
    let h = (hi - lo) / intervals as f64;
    let mut sum = 0.0;
    for i in 0..=intervals {
        let x = lo + h * i as f64;
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::Quadrature(format!(
                "integrand not finite at x={x}: {v}"
            )));
        }
        let w = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * v;
    }
    Ok(sum * h / 3.0)
}

/// Unnormalized standard-normal-family pdf, handy for divergence tests.
pub fn gaussian_pdf(mean: f64, sd: f64) -> impl Fn(f64) -> f64 + Send + Sync {
    let norm = 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt());
    move |x: f64| norm * (-0.5 * ((x - mean) / sd).powi(2)).exp()
}
