//! The `benchmark` subcommand: a cross-validated degrees-of-freedom sweep
//! reporting converged precisions and iteration counts per trial.

use std::time::Instant;

use blrs_core::{fit_qem, normalize_columns, precompute, Dataset, FitConfig, FitResult, Nu};
use nalgebra::{DMatrix, DVector};

use crate::error::CliError;
use crate::split::SplitSpec;
use crate::table::{sci10, sci_nu};

/// One fitted cell of the sweep.
#[derive(Debug, Clone, Copy)]
pub struct BenchmarkRow {
    pub nu: Nu,
    pub alpha: f64,
    pub beta: f64,
    /// M-step updates executed.
    pub cnt: usize,
    pub converged: bool,
    pub wall_time_ms: f64,
}

/// All rows of one trial, in the input order of the requested `nu` values.
#[derive(Debug, Clone)]
pub struct TrialReport {
    pub trial: usize,
    pub folds: usize,
    pub train_rows: usize,
    pub n_basis: usize,
    pub rows: Vec<BenchmarkRow>,
}

/// Fits every requested `nu` on the training part of one trial. The fits run
/// concurrently on the shared precompute; rows come back in input order.
pub fn run_trial(
    data: &Dataset,
    spec: SplitSpec,
    nus: &[Nu],
    rel_tol: f64,
) -> Result<TrialReport, CliError> {
    spec.validate(data.n_rows())?;
    let train = spec.training_rows(data.n_rows());
    let subset = subset_rows(data, &train)?;
    let (phi, _) = normalize_columns(&subset)?;
    let pre = precompute(&phi, subset.targets())?;
    let config = FitConfig {
        rel_tol,
        ..FitConfig::default()
    };

    let outcomes: Vec<blrs_core::Result<(FitResult, f64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = nus
            .iter()
            .map(|&nu| {
                let (pre, phi, config) = (&pre, &phi, &config);
                scope.spawn(move || {
                    let start = Instant::now();
                    let fit = fit_qem(pre, phi, nu, config)?;
                    Ok((fit, start.elapsed().as_secs_f64() * 1e3))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fit thread panicked"))
            .collect()
    });

    let mut rows = Vec::with_capacity(nus.len());
    for (&nu, outcome) in nus.iter().zip(outcomes) {
        let (fit, wall_time_ms) = outcome?;
        rows.push(BenchmarkRow {
            nu,
            alpha: fit.hyperparams.alpha,
            beta: fit.hyperparams.beta,
            cnt: fit.iterations,
            converged: fit.converged,
            wall_time_ms,
        });
    }
    Ok(TrialReport {
        trial: spec.trial,
        folds: spec.folds,
        train_rows: subset.n_rows(),
        n_basis: phi.n_basis(),
        rows,
    })
}

/// Renders one trial as a fixed-width table plus the speedup line. Contains
/// nothing non-deterministic, so repeated runs are byte-identical.
pub fn render_trial(report: &TrialReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "trial {}/{}  (train m={}, M={})\n",
        report.trial, report.folds, report.train_rows, report.n_basis
    ));
    out.push_str(&format!(
        "{:<9} {:<18} {:<18} {:>6}\n",
        "nu", "alpha", "beta", "cnt"
    ));
    for row in &report.rows {
        let cnt = if row.converged {
            row.cnt.to_string()
        } else {
            "DNC".to_string()
        };
        out.push_str(&format!(
            "{:<9} {:<18} {:<18} {:>6}\n",
            sci_nu(row.nu),
            sci10(row.alpha),
            sci10(row.beta),
            cnt
        ));
    }
    if let Some(line) = speedup_line(report) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Compares the iteration count at the smallest finite `nu` against the
/// Gaussian run, when both are present and converged.
fn speedup_line(report: &TrialReport) -> Option<String> {
    let smallest = report
        .rows
        .iter()
        .filter(|r| r.converged && !r.nu.is_infinite())
        .min_by(|a, b| a.nu.value().total_cmp(&b.nu.value()))?;
    let gaussian = report
        .rows
        .iter()
        .find(|r| r.converged && r.nu.is_infinite())?;
    let pct = 100.0 * (gaussian.cnt as f64 - smallest.cnt as f64) / gaussian.cnt as f64;
    Some(format!(
        "speedup: {pct:.1}% (cnt {} at nu={} vs {} at nu=inf)",
        smallest.cnt,
        sci_nu(smallest.nu),
        gaussian.cnt
    ))
}

fn subset_rows(data: &Dataset, rows: &[usize]) -> Result<Dataset, CliError> {
    let mut features = DMatrix::zeros(rows.len(), data.n_cols());
    let mut targets = DVector::zeros(rows.len());
    for (dst, &src) in rows.iter().enumerate() {
        for j in 0..data.n_cols() {
            features[(dst, j)] = data.features()[(src, j)];
        }
        targets[dst] = data.targets()[src];
    }
    Ok(Dataset::new(
        features,
        targets,
        data.column_names().map(|n| n.to_vec()),
    )?)
}
