//! Dataset ingestion, column normalization, and the one-time spectral
//! precomputation every fit iteration reads from.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::eigen::sym_eigendecompose;
use crate::error::{Error, Result};

/// Raw samples: an m x n feature matrix plus an m-vector of targets.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: DMatrix<f64>,
    targets: DVector<f64>,
    column_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(
        features: DMatrix<f64>,
        targets: DVector<f64>,
        column_names: Option<Vec<String>>,
    ) -> Result<Self> {
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(Error::EmptyInput(
                "dataset needs at least one row and one column".into(),
            ));
        }
        if targets.len() != features.nrows() {
            return Err(Error::Dimension {
                what: "dataset targets",
                expected: features.nrows(),
                found: targets.len(),
            });
        }
        if let Some(names) = &column_names {
            if names.len() != features.ncols() {
                return Err(Error::Dimension {
                    what: "dataset column names",
                    expected: features.ncols(),
                    found: names.len(),
                });
            }
        }
        if features.iter().any(|v| !v.is_finite()) || targets.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("dataset contains non-finite entries".into()));
        }
        Ok(Self {
            features,
            targets,
            column_names,
        })
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn targets(&self) -> &DVector<f64> {
        &self.targets
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    /// Number of samples m.
    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    /// Number of raw feature columns n.
    pub fn n_cols(&self) -> usize {
        self.features.ncols()
    }
}

/// Selects the target column of a CSV file by header name or 0-based index.
///
/// With a header row the string is matched against column names first and
/// falls back to an index when it parses as an integer; without a header only
/// integer selectors are accepted.
#[derive(Debug, Clone)]
pub struct ColumnSelector(String);

impl ColumnSelector {
    pub fn new(raw: impl Into<String>) -> Self {
        Self(raw.into())
    }

    fn resolve(&self, headers: Option<&[String]>, n_cols: usize) -> Result<usize> {
        if let Some(names) = headers {
            if let Some(idx) = names.iter().position(|h| h == &self.0) {
                return Ok(idx);
            }
        }
        if let Ok(idx) = self.0.parse::<usize>() {
            if idx < n_cols {
                return Ok(idx);
            }
        }
        Err(Error::UnknownTargetColumn(self.0.clone()))
    }
}

/// Basis applied to raw features when forming the design matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// The design matrix is the normalized feature matrix itself.
    Identity,
}

/// The m x M design matrix consumed by the model.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub phi: DMatrix<f64>,
    pub basis: Basis,
}

impl DesignMatrix {
    pub fn n_obs(&self) -> usize {
        self.phi.nrows()
    }

    pub fn n_basis(&self) -> usize {
        self.phi.ncols()
    }

    /// More basis columns than rows: permitted, but worth flagging since the
    /// spectral shortcut assumes M <= m for its cost advantage.
    pub fn is_wide(&self) -> bool {
        self.n_basis() > self.n_obs()
    }
}

/// Per-column statistics recorded while normalizing, needed to transform new
/// data the same way.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationReport {
    /// Mean subtracted from each retained column.
    pub means: Vec<f64>,
    /// Euclidean norm each centered column was divided by.
    pub norms: Vec<f64>,
    /// Original indices of constant columns that were dropped.
    pub dropped_columns: Vec<usize>,
}

impl NormalizationReport {
    /// Number of columns the raw data had.
    pub fn n_original(&self) -> usize {
        self.means.len() + self.dropped_columns.len()
    }

    /// Number of retained (normalized) columns, i.e. M.
    pub fn n_retained(&self) -> usize {
        self.means.len()
    }

    /// Applies the stored statistics to new raw features: drops the same
    /// columns, then centers and scales with the training means and norms.
    pub fn transform(&self, raw: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if raw.ncols() != self.n_original() {
            return Err(Error::Dimension {
                what: "feature columns",
                expected: self.n_original(),
                found: raw.ncols(),
            });
        }
        let mut out = DMatrix::zeros(raw.nrows(), self.n_retained());
        let mut dst = 0;
        for src in 0..raw.ncols() {
            if self.dropped_columns.contains(&src) {
                continue;
            }
            for i in 0..raw.nrows() {
                out[(i, dst)] = (raw[(i, src)] - self.means[dst]) / self.norms[dst];
            }
            dst += 1;
        }
        Ok(out)
    }
}

type NumericRows = (Vec<Vec<f64>>, Option<Vec<String>>);

fn read_numeric_rows(path: &Path, has_header: bool) -> Result<NumericRows> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .from_path(path)
        .map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e),
        })?;

    let headers: Option<Vec<String>> = if has_header {
        let h = reader
            .headers()
            .map_err(|e| csv_error(path, e))?
            .iter()
            .map(str::to_owned)
            .collect();
        Some(h)
    } else {
        None
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut n_cols = headers.as_ref().map(|h| h.len());
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let width = *n_cols.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::CsvParse {
                line,
                column: "-".into(),
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        let mut row = Vec::with_capacity(record.len());
        for (j, cell) in record.iter().enumerate() {
            let column = column_label(&headers, j);
            let value: f64 = cell.trim().parse().map_err(|_| Error::CsvParse {
                line,
                column: column.clone(),
                message: format!("not a number: {cell:?}"),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvParse {
                    line,
                    column,
                    message: format!("non-finite value: {cell:?}"),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no data rows in {}",
            path.display()
        )));
    }
    Ok((rows, headers))
}

/// Loads a delimiter-separated numeric file, splitting off the target column.
pub fn load_csv(path: &Path, target: &ColumnSelector, has_header: bool) -> Result<Dataset> {
    let (rows, headers) = read_numeric_rows(path, has_header)?;
    let n_cols = rows[0].len();
    let target_idx = target.resolve(headers.as_deref(), n_cols)?;
    if n_cols < 2 {
        return Err(Error::EmptyInput(
            "no feature columns besides the target".into(),
        ));
    }

    let m = rows.len();
    let n = n_cols - 1;
    let mut features = DMatrix::zeros(m, n);
    let mut targets = DVector::zeros(m);
    for (i, row) in rows.iter().enumerate() {
        let mut dst = 0;
        for (j, &v) in row.iter().enumerate() {
            if j == target_idx {
                targets[i] = v;
            } else {
                features[(i, dst)] = v;
                dst += 1;
            }
        }
    }
    let column_names = headers.map(|h| {
        h.into_iter()
            .enumerate()
            .filter(|(j, _)| *j != target_idx)
            .map(|(_, s)| s)
            .collect()
    });
    Dataset::new(features, targets, column_names)
}

/// Loads a numeric file with no target column, e.g. rows to score.
pub fn load_feature_matrix(path: &Path, has_header: bool) -> Result<DMatrix<f64>> {
    let (rows, _) = read_numeric_rows(path, has_header)?;
    let (m, n) = (rows.len(), rows[0].len());
    let mut features = DMatrix::zeros(m, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            features[(i, j)] = v;
        }
    }
    Ok(features)
}

fn column_label(headers: &Option<Vec<String>>, j: usize) -> String {
    match headers {
        Some(h) => h.get(j).cloned().unwrap_or_else(|| format!("{j}")),
        None => format!("{j}"),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.position() {
        Some(pos) => Error::CsvParse {
            line: pos.line(),
            column: "-".into(),
            message: e.to_string(),
        },
        None => Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e),
        },
    }
}

/// Centers every feature column to mean zero and scales it to unit Euclidean
/// norm. Constant columns cannot be scaled and are dropped instead, with
/// their indices recorded in the report.
pub fn normalize_columns(d: &Dataset) -> Result<(DesignMatrix, NormalizationReport)> {
    let m = d.n_rows();
    if m < 2 {
        return Err(Error::Domain(format!(
            "normalization needs at least 2 rows, got {m}"
        )));
    }
    let mut means = Vec::new();
    let mut norms = Vec::new();
    let mut dropped = Vec::new();
    let mut columns: Vec<DVector<f64>> = Vec::new();
    for j in 0..d.n_cols() {
        let col = d.features().column(j);
        let mean = col.sum() / m as f64;
        let centered = DVector::from_iterator(m, col.iter().map(|v| v - mean));
        let norm = centered.norm();
        let scale = col.amax().max(mean.abs());
        if norm <= 1e-12 * scale * (m as f64).sqrt() {
            dropped.push(j);
            continue;
        }
        means.push(mean);
        norms.push(norm);
        columns.push(centered / norm);
    }
    if columns.is_empty() {
        return Err(Error::AllColumnsConstant);
    }
    let phi = DMatrix::from_columns(&columns);
    Ok((
        DesignMatrix {
            phi,
            basis: Basis::Identity,
        },
        NormalizationReport {
            means,
            norms,
            dropped_columns: dropped,
        },
    ))
}

/// Spectral cache built once per dataset: the eigendecomposition of the
/// M x M gram matrix plus the projected target vectors. Everything a fit
/// iteration needs afterwards is O(M) or O(M^2).
#[derive(Debug, Clone)]
pub struct Precompute {
    /// Orthogonal eigenvector matrix of the gram matrix.
    pub v: DMatrix<f64>,
    /// Eigenvalues of the gram matrix, descending, clamped at zero.
    pub d: DVector<f64>,
    /// Projected targets Φᵀy.
    pub y_p: DVector<f64>,
    /// Rotated projection Vᵀ(Φᵀy).
    pub y_pv: DVector<f64>,
    /// Squared norm of the target vector.
    pub y_norm_sq: f64,
    /// Sample count m.
    pub n_obs: usize,
    /// Basis count M.
    pub n_basis: usize,
}

/// Builds the [`Precompute`] cache; the only per-fit step whose cost is
/// superlinear in M.
pub fn precompute(phi: &DesignMatrix, y: &DVector<f64>) -> Result<Precompute> {
    if y.len() != phi.n_obs() {
        return Err(Error::Dimension {
            what: "targets",
            expected: phi.n_obs(),
            found: y.len(),
        });
    }
    let gram = phi.phi.tr_mul(&phi.phi);
    let (v, mut d) = sym_eigendecompose(&gram)?;
    let neg_tol = 1e-10 * gram.amax().max(1.0);
    for i in 0..d.len() {
        if d[i] < 0.0 {
            if d[i] < -neg_tol {
                return Err(Error::IndefiniteGram(d[i]));
            }
            d[i] = 0.0;
        }
    }
    let y_p = phi.phi.tr_mul(y);
    let y_pv = v.tr_mul(&y_p);
    Ok(Precompute {
        v,
        d,
        y_p,
        y_pv,
        y_norm_sq: y.norm_squared(),
        n_obs: phi.n_obs(),
        n_basis: phi.n_basis(),
    })
}
