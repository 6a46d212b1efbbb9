//! The `gen-synthetic` subcommand: write a seeded dataset to CSV.

use std::path::Path;

use blrs_core::synth;

use crate::error::CliError;

/// Generates `rows x cols` features plus a target column and writes them as
/// CSV with header `x1,...,xM,y`. Byte-identical for identical arguments.
pub fn run_gen(
    rows: usize,
    cols: usize,
    alpha_true: f64,
    beta_true: f64,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let data = synth::generate(rows, cols, alpha_true, beta_true, seed)?;
    let names = data.column_names().expect("generator names its columns");
    let mut text = String::new();
    text.push_str(&names.join(","));
    text.push_str(",y\n");
    for i in 0..data.n_rows() {
        for j in 0..data.n_cols() {
            text.push_str(&format!("{},", data.features()[(i, j)]));
        }
        text.push_str(&format!("{}\n", data.targets()[i]));
    }
    std::fs::write(out, text).map_err(|e| blrs_core::Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    Ok(())
}
