//! The `predict` subcommand: score new rows with a saved model.

use std::path::Path;

use blrs_core::{load_feature_matrix, predict, SavedModel};
use nalgebra::DVector;

use crate::error::CliError;
use crate::input::sniff_header;

/// Applies the stored normalization to the input rows and writes one
/// prediction per row as a single-column CSV. Returns the row count.
pub fn run_predict(model_path: &Path, input: &Path, out: &Path) -> Result<usize, CliError> {
    let model = SavedModel::load(model_path)?;
    let report = model.normalization.to_report();
    let has_header = sniff_header(input)?;
    let raw = load_feature_matrix(input, has_header)?;
    let phi_new = report.transform(&raw)?;
    let mu = DVector::from_vec(model.mu.clone());
    let predictions = predict(&mu, &phi_new)?;

    let mut text = String::with_capacity(16 * predictions.len() + 16);
    text.push_str("prediction\n");
    for v in predictions.iter() {
        text.push_str(&format!("{v}\n"));
    }
    std::fs::write(out, text).map_err(|e| blrs_core::Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    Ok(predictions.len())
}
