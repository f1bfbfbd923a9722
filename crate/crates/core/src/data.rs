//! Tabular data model: ingestion, preprocessing and seeded splitting.
//!
//! A [`Dataset`] is an n x width matrix of finite reals with named feature
//! columns, an optional constant-1 intercept as column 0 and optional
//! per-row class labels in `1..=C`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    feature_names: Vec<String>,
    labels: Option<Vec<usize>>,
    standardized: bool,
    has_intercept: bool,
}

impl Dataset {
    /// Builds a dataset and checks its invariants: finite values, a constant-1
    /// column 0 when `has_intercept`, labels of length n with values >= 1.
    pub fn new(
        features: Matrix,
        feature_names: Vec<String>,
        labels: Option<Vec<usize>>,
        standardized: bool,
        has_intercept: bool,
    ) -> Result<Self> {
        let expected = feature_names.len() + usize::from(has_intercept);
        if features.cols() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: features.cols(),
            });
        }
        if let Some((i, _)) = features.as_slice().iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "non-finite value at flat offset {i}"
            )));
        }
        if has_intercept && features.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::Invalid("intercept column is not identically 1".into()));
        }
        if let Some(ls) = &labels {
            if ls.len() != features.rows() {
                return Err(Error::LengthMismatch(ls.len(), features.rows()));
            }
            if ls.iter().any(|&l| l == 0) {
                return Err(Error::BadLabel {
                    label: 0,
                    n_classes: ls.iter().copied().max().unwrap_or(0),
                });
            }
        }
        Ok(Dataset {
            features,
            feature_names,
            labels,
            standardized,
            has_intercept,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], feature_names: Vec<String>) -> Result<Self> {
        Dataset::new(Matrix::from_rows(rows)?, feature_names, None, false, false)
    }

    pub fn n(&self) -> usize {
        self.features.rows()
    }

    /// Number of features, excluding the intercept column.
    pub fn p(&self) -> usize {
        self.feature_names.len()
    }

    /// Full matrix width (p, or p+1 with intercept).
    pub fn width(&self) -> usize {
        self.features.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.features
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Values of feature `j` (0-based among the named features, so the
    /// intercept never counts).
    pub fn feature_column(&self, j: usize) -> Vec<f64> {
        self.features.column(j + usize::from(self.has_intercept))
    }

    /// The feature part of row `i`, skipping the intercept if present.
    pub fn feature_row(&self, i: usize) -> &[f64] {
        &self.features.row(i)[usize::from(self.has_intercept)..]
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Largest label value, when labels are present.
    pub fn n_classes(&self) -> Option<usize> {
        self.labels.as_ref().map(|ls| ls.iter().copied().max().unwrap_or(0))
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    pub fn with_labels(&self, labels: Vec<usize>) -> Result<Self> {
        Dataset::new(
            self.features.clone(),
            self.feature_names.clone(),
            Some(labels),
            self.standardized,
            self.has_intercept,
        )
    }

    pub fn without_labels(&self) -> Self {
        let mut d = self.clone();
        d.labels = None;
        d
    }

    /// New dataset containing the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = idx.iter().map(|&i| self.features.row(i).to_vec()).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|ls| idx.iter().map(|&i| ls[i]).collect());
        Dataset::new(
            Matrix::from_rows(&rows)?,
            self.feature_names.clone(),
            labels,
            self.standardized,
            self.has_intercept,
        )
    }

    /// Writes the dataset as CSV: feature columns under their names plus a
    /// trailing `label` column when labels are present. The intercept column
    /// is not written.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        let mut header: Vec<String> = self.feature_names.clone();
        if self.labels.is_some() {
            header.push("label".to_string());
        }
        writeln_str(&mut out, &header.join(","));
        for i in 0..self.n() {
            let mut cells: Vec<String> = self
                .feature_row(i)
                .iter()
                .map(|v| format_cell(*v))
                .collect();
            if let Some(ls) = &self.labels {
                cells.push(ls[i].to_string());
            }
            writeln_str(&mut out, &cells.join(","));
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

fn writeln_str(buf: &mut String, line: &str) {
    let _ = writeln!(buf, "{line}");
}

fn format_cell(v: f64) -> String {
    // Shortest representation that round-trips through f64.
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

/// Per-feature centering/scaling parameters (population standard deviation,
/// divisor n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl ScalingParams {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Maps a standardized dataset back to original units.
    pub fn inverse(&self, d: &Dataset) -> Result<Dataset> {
        if d.has_intercept() {
            return Err(Error::InterceptAlreadyPresent);
        }
        if d.p() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                got: d.p(),
            });
        }
        let rows: Vec<Vec<f64>> = (0..d.n())
            .map(|i| {
                d.row(i)
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * self.scales[j] + self.means[j])
                    .collect()
            })
            .collect();
        Dataset::new(
            Matrix::from_rows(&rows)?,
            d.feature_names().to_vec(),
            d.labels().map(<[usize]>::to_vec),
            false,
            false,
        )
    }

    /// Applies the stored centering/scaling to a raw dataset.
    pub fn apply(&self, d: &Dataset) -> Result<Dataset> {
        if d.has_intercept() {
            return Err(Error::InterceptAlreadyPresent);
        }
        if d.p() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                got: d.p(),
            });
        }
        let rows: Vec<Vec<f64>> = (0..d.n())
            .map(|i| {
                d.row(i)
                    .iter()
                    .enumerate()
                    .map(|(j, v)| (v - self.means[j]) / self.scales[j])
                    .collect()
            })
            .collect();
        Dataset::new(
            Matrix::from_rows(&rows)?,
            d.feature_names().to_vec(),
            d.labels().map(<[usize]>::to_vec),
            true,
            false,
        )
    }
}

/// Train/validation/inference fractions plus the shuffle seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub fractions: Vec<f64>,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(fractions: Vec<f64>, seed: u64) -> Result<Self> {
        let spec = SplitSpec { fractions, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.fractions.iter().sum();
        if self.fractions.is_empty()
            || self.fractions.iter().any(|&f| !(f > 0.0) || !f.is_finite())
            || (sum - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidFractions(self.fractions.clone()));
        }
        Ok(())
    }
}

/// Loads a comma-separated UTF-8 file of reals. With `has_header` the first
/// line names the columns; otherwise columns are named `x1..xp`. When
/// `label_column` is given, that column is parsed as positive integer class
/// labels instead of a feature.
pub fn load_csv(path: &Path, has_header: bool, label_column: Option<&str>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text, has_header, label_column)
}

pub(crate) fn parse_csv(
    text: &str,
    has_header: bool,
    label_column: Option<&str>,
) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();

    let Some(&(_, first)) = lines.peek() else {
        return Err(Error::Parse {
            row: 0,
            col: 0,
            msg: "empty file".into(),
        });
    };
    let n_cols = first.split(',').count();

    let mut names: Vec<String> = if has_header {
        let (_, header) = lines.next().expect("peeked");
        header.split(',').map(|s| s.trim().to_string()).collect()
    } else {
        (1..=n_cols).map(|j| format!("x{j}")).collect()
    };

    let label_idx = match label_column {
        Some(name) => Some(
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::MissingColumn(name.to_string()))?,
        ),
        None => None,
    };
    if let Some(idx) = label_idx {
        names.remove(idx);
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for (line_no, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n_cols {
            return Err(Error::Parse {
                row: line_no + 1,
                col: cells.len(),
                msg: format!("expected {n_cols} cells, found {}", cells.len()),
            });
        }
        let mut row = Vec::with_capacity(n_cols - usize::from(label_idx.is_some()));
        for (c, cell) in cells.iter().enumerate() {
            let cell = cell.trim();
            if Some(c) == label_idx {
                let l: usize = cell.parse().map_err(|_| Error::Parse {
                    row: line_no + 1,
                    col: c + 1,
                    msg: format!("label cell '{cell}' is not a positive integer"),
                })?;
                labels.push(l);
            } else {
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    row: line_no + 1,
                    col: c + 1,
                    msg: format!("cell '{cell}' is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        row: line_no + 1,
                        col: c + 1,
                        msg: format!("cell '{cell}' is not finite"),
                    });
                }
                row.push(v);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            row: if has_header { 1 } else { 0 },
            col: 0,
            msg: "no data rows".into(),
        });
    }

    Dataset::new(
        Matrix::from_rows(&rows)?,
        names,
        if label_idx.is_some() { Some(labels) } else { None },
        false,
        false,
    )
}

/// Centers every feature to mean 0 and scales to unit population variance.
/// Fails on constant columns rather than dropping them, so feature indices
/// stay aligned with downstream reports.
pub fn standardize(d: &Dataset) -> Result<(Dataset, ScalingParams)> {
    if d.has_intercept() {
        return Err(Error::InterceptAlreadyPresent);
    }
    if d.n() < 2 {
        return Err(Error::TooFewSamples { got: d.n(), min: 2 });
    }
    let n = d.n() as f64;
    let mut means = Vec::with_capacity(d.p());
    let mut scales = Vec::with_capacity(d.p());
    for j in 0..d.p() {
        let col = d.feature_column(j);
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let scale = var.sqrt();
        if scale <= 0.0 {
            return Err(Error::DegenerateFeature(d.feature_names()[j].clone()));
        }
        means.push(mean);
        scales.push(scale);
    }
    let params = ScalingParams { means, scales };
    let scaled = params.apply(d)?;
    Ok((scaled, params))
}

/// Replaces each named column by one indicator column per distinct value,
/// in ascending value order, suffixed `name=value`.
pub fn one_hot_encode(d: &Dataset, categorical_columns: &[String]) -> Result<Dataset> {
    if d.has_intercept() {
        return Err(Error::InterceptAlreadyPresent);
    }
    for name in categorical_columns {
        if !d.feature_names().contains(name) {
            return Err(Error::MissingColumn(name.clone()));
        }
    }
    let mut new_names: Vec<String> = Vec::new();
    let mut new_cols: Vec<Vec<f64>> = Vec::new();
    for (j, name) in d.feature_names().iter().enumerate() {
        let col = d.feature_column(j);
        if categorical_columns.contains(name) {
            let mut distinct: BTreeSet<u64> = BTreeSet::new();
            for v in &col {
                distinct.insert(v.to_bits());
            }
            let mut values: Vec<f64> = distinct.into_iter().map(f64::from_bits).collect();
            values.sort_by(f64::total_cmp);
            for value in values {
                new_names.push(format!("{name}={}", format_cell_short(value)));
                new_cols.push(
                    col.iter()
                        .map(|&v| if v == value { 1.0 } else { 0.0 })
                        .collect(),
                );
            }
        } else {
            new_names.push(name.clone());
            new_cols.push(col);
        }
    }
    let rows: Vec<Vec<f64>> = (0..d.n())
        .map(|i| new_cols.iter().map(|c| c[i]).collect())
        .collect();
    Dataset::new(
        Matrix::from_rows(&rows)?,
        new_names,
        d.labels().map(<[usize]>::to_vec),
        false,
        false,
    )
}

fn format_cell_short(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Prepends the constant-1 intercept column.
pub fn add_intercept(d: &Dataset) -> Result<Dataset> {
    if d.has_intercept() {
        return Err(Error::InterceptAlreadyPresent);
    }
    let rows: Vec<Vec<f64>> = (0..d.n())
        .map(|i| {
            let mut row = Vec::with_capacity(d.width() + 1);
            row.push(1.0);
            row.extend_from_slice(d.row(i));
            row
        })
        .collect();
    Dataset::new(
        Matrix::from_rows(&rows)?,
        d.feature_names().to_vec(),
        d.labels().map(<[usize]>::to_vec),
        d.is_standardized(),
        true,
    )
}

/// Partitions rows into disjoint subsets whose sizes are the fractions
/// rounded by largest remainder. Deterministic for a fixed seed; row order
/// within each part follows the original dataset.
pub fn split(d: &Dataset, spec: &SplitSpec) -> Result<Vec<Dataset>> {
    spec.validate()?;
    let n = d.n();
    let parts = spec.fractions.len();
    if n < parts {
        return Err(Error::TooFewSamples { got: n, min: parts });
    }
    let sizes = largest_remainder_sizes(n, &spec.fractions);

    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    idx.shuffle(&mut rng);

    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for &sz in &sizes {
        let mut part: Vec<usize> = idx[start..start + sz].to_vec();
        part.sort_unstable();
        out.push(d.select_rows(&part)?);
        start += sz;
    }
    Ok(out)
}

pub(crate) fn largest_remainder_sizes(n: usize, fractions: &[f64]) -> Vec<usize> {
    let mut sizes: Vec<usize> = fractions.iter().map(|f| (f * n as f64).floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut rema: Vec<(usize, f64)> = fractions
        .iter()
        .enumerate()
        .map(|(i, f)| (i, f * n as f64 - sizes[i] as f64))
        .collect();
    rema.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for k in 0..n.saturating_sub(assigned) {
        sizes[rema[k % rema.len()].0] += 1;
    }
    sizes
}
