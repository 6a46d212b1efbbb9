//! The `fit` subcommand: learn hyperparameters and persist the model.

use std::path::Path;

use blrs_core::{
    fit_qem, log_evidence, ml_solve, normalize_columns, posterior_mean, precompute,
    project_spectrum, FitConfig, Nu, SavedModel,
};

use crate::error::CliError;
use crate::input::load_dataset;
use crate::table::{sci10, sci_nu};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Solver {
    /// Expectation-maximization from (alpha0, beta0) = (1, 1).
    Qem,
    /// One-dimensional maximum-likelihood reduction (grid + golden section).
    Oracle,
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Solver::Qem => write!(f, "qem"),
            Solver::Oracle => write!(f, "oracle"),
        }
    }
}

pub struct FitSummary {
    pub model: SavedModel,
    pub log_evidence: f64,
    pub solver: Solver,
}

impl FitSummary {
    /// The one-line report printed on standard output.
    pub fn line(&self) -> String {
        format!(
            "fit: solver={} nu={} alpha={} beta={} cnt={} log_evidence={:.6} converged={}",
            self.solver,
            sci_nu(self.model.nu),
            sci10(self.model.alpha),
            sci10(self.model.beta),
            self.model.iterations,
            self.log_evidence,
            self.model.converged
        )
    }
}

pub fn run_fit(
    input: &Path,
    target: &str,
    nu: Nu,
    solver: Solver,
    rel_tol: f64,
    max_iter: usize,
    out: &Path,
) -> Result<FitSummary, CliError> {
    let data = load_dataset(input, target)?;
    let (phi, report) = normalize_columns(&data)?;
    if phi.is_wide() {
        eprintln!(
            "warning: wide design matrix (M={} basis columns > m={} rows)",
            phi.n_basis(),
            phi.n_obs()
        );
    }
    let pre = precompute(&phi, data.targets())?;

    let model = match solver {
        Solver::Qem => {
            let config = FitConfig {
                rel_tol,
                max_iter,
                ..FitConfig::default()
            };
            let fit = fit_qem(&pre, &phi, nu, &config)?;
            SavedModel::from_fit(&fit, &report)
        }
        Solver::Oracle => {
            let sol = ml_solve(&project_spectrum(&pre), pre.n_obs)?;
            if !sol.alpha.is_finite() {
                return Err(blrs_core::Error::Degenerate(
                    "maximum likelihood sits at gamma = 0 (targets orthogonal to the features); \
                     no finite weight precision exists"
                        .into(),
                )
                .into());
            }
            let mu = posterior_mean(&pre, sol.alpha, sol.beta);
            SavedModel {
                nu,
                alpha: sol.alpha,
                beta: sol.beta,
                mu: mu.iter().copied().collect(),
                normalization: (&report).into(),
                iterations: 0,
                converged: true,
            }
        }
    };
    let log_ev = log_evidence(&pre, nu, model.alpha, model.beta);
    model.save(out)?;
    Ok(FitSummary {
        model,
        log_evidence: log_ev,
        solver,
    })
}
