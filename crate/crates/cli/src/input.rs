//! Input loading shared by the subcommands.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use blrs_core::{load_csv, ColumnSelector, Dataset};

use crate::error::CliError;

/// Detects a header row: the file is treated as headerless only when every
/// field of the first line parses as a finite number.
pub fn sniff_header(path: &Path) -> Result<bool, CliError> {
    let file = File::open(path).map_err(|e| blrs_core::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut first = String::new();
    BufReader::new(file)
        .read_line(&mut first)
        .map_err(|e| blrs_core::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
    let trimmed = first.trim();
    if trimmed.is_empty() {
        return Ok(false);
    }
    let all_numeric = trimmed.split(',').all(|cell| {
        cell.trim()
            .parse::<f64>()
            .map(|v| v.is_finite())
            .unwrap_or(false)
    });
    Ok(!all_numeric)
}

/// Loads a dataset, sniffing for a header row first.
pub fn load_dataset(path: &Path, target: &str) -> Result<Dataset, CliError> {
    let has_header = sniff_header(path)?;
    Ok(load_csv(path, &ColumnSelector::new(target), has_header)?)
}
