//! JSON persistence for fitted models.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::NormalizationReport;
use crate::error::{Error, Result};
use crate::model::{FitResult, Nu};

/// Normalization statistics as stored on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SavedNormalization {
    pub means: Vec<f64>,
    pub norms: Vec<f64>,
    pub dropped: Vec<usize>,
}

impl From<&NormalizationReport> for SavedNormalization {
    fn from(r: &NormalizationReport) -> Self {
        Self {
            means: r.means.clone(),
            norms: r.norms.clone(),
            dropped: r.dropped_columns.clone(),
        }
    }
}

impl SavedNormalization {
    pub fn to_report(&self) -> NormalizationReport {
        NormalizationReport {
            means: self.means.clone(),
            norms: self.norms.clone(),
            dropped_columns: self.dropped.clone(),
        }
    }
}

/// A fitted model: converged hyperparameters, posterior mean weights, and the
/// normalization needed to score new data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SavedModel {
    pub nu: Nu,
    pub alpha: f64,
    pub beta: f64,
    pub mu: Vec<f64>,
    pub normalization: SavedNormalization,
    pub iterations: usize,
    pub converged: bool,
}

impl SavedModel {
    pub fn from_fit(fit: &FitResult, report: &NormalizationReport) -> Self {
        Self {
            nu: fit.hyperparams.nu,
            alpha: fit.hyperparams.alpha,
            beta: fit.hyperparams.beta,
            mu: fit.mu.iter().copied().collect(),
            normalization: report.into(),
            iterations: fit.iterations,
            converged: fit.converged,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        self.validate()?;
        serde_json::to_string_pretty(self).map_err(|e| Error::ModelFormat(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = self.to_json()?;
        std::fs::write(path, json).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let model: SavedModel =
            serde_json::from_str(&text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0 && self.beta.is_finite() && self.beta > 0.0)
        {
            return Err(Error::ModelFormat(format!(
                "precisions must be finite and positive, got alpha={}, beta={}",
                self.alpha, self.beta
            )));
        }
        if self.mu.len() != self.normalization.means.len()
            || self.mu.len() != self.normalization.norms.len()
        {
            return Err(Error::ModelFormat(format!(
                "weight count {} does not match normalization statistics ({} means, {} norms)",
                self.mu.len(),
                self.normalization.means.len(),
                self.normalization.norms.len()
            )));
        }
        Ok(())
    }
}
