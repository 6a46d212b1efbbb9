//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Jacobi is unconditionally stable for symmetric matrices and, with a fixed
//! sweep order and sign convention, fully deterministic — the same input
//! always produces bit-identical output. That determinism is relied on by the
//! spectral precomputation and the benchmark reproducibility tests.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAG_TOL: f64 = 1e-12;

/// Decomposes a symmetric matrix as `S = V · diag(D) · Vᵀ`.
///
/// The input is symmetrized as `(S + Sᵀ)/2` first; asymmetry beyond 1e-10 is
/// rejected. Eigenvalues come back in descending order (stable for ties) and
/// each eigenvector is oriented so its largest-magnitude entry is positive.
pub fn sym_eigendecompose(s: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = s.nrows();
    if n != s.ncols() {
        return Err(Error::Dimension {
            what: "sym_eigendecompose",
            expected: n,
            found: s.ncols(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyInput("cannot decompose a 0x0 matrix".into()));
    }
    let scale = s.amax().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (s[(i, j)] - s[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::Domain(format!(
                    "matrix is not symmetric: |S[{i},{j}] - S[{j},{i}]| = {:.3e}",
                    (s[(i, j)] - s[(j, i)]).abs()
                )));
            }
        }
    }

    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = 0.5 * (s[(i, j)] + s[(j, i)]);
        }
    }
    let mut v = DMatrix::<f64>::identity(n, n);
    let fro = a.norm();
    let target = OFF_DIAG_TOL * fro;

    let mut converged = fro == 0.0;
    let mut off = off_diagonal_norm(&a);
    for _ in 0..MAX_SWEEPS {
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                // A <- Jᵀ A J with J rotating the (p, q) plane
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
        off = off_diagonal_norm(&a);
    }
    if !converged && off > target {
        return Err(Error::EigenNonConvergence {
            sweeps: MAX_SWEEPS,
            off_diag: off,
        });
    }

    // Stable descending sort keeps the Jacobi output order for ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .partial_cmp(&a[(i, i)])
            .expect("finite eigenvalues")
    });

    let mut eigvals = DVector::zeros(n);
    let mut eigvecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigvals[dst] = a[(src, src)];
        let mut max_abs = 0.0;
        let mut max_sign = 1.0;
        for k in 0..n {
            let e = v[(k, src)];
            if e.abs() > max_abs {
                max_abs = e.abs();
                max_sign = e.signum();
            }
        }
        for k in 0..n {
            eigvecs[(k, dst)] = v[(k, src)] * max_sign;
        }
    }
    Ok((eigvecs, eigvals))
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                sum += a[(p, q)] * a[(p, q)];
            }
        }
    }
    sum.sqrt()
}
