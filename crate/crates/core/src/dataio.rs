//! CSV ingestion, standard scaling, subsampling and synthetic outlier injection.

use crate::{Error, Result};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fs::File;
use std::path::{Path, PathBuf};

/// Tolerance on mean/std of every non-constant column after scaling.
pub const SCALE_TOL: f64 = 1e-9;

// ChaCha stream ids, so sampling and injection with the same seed draw
// independent sequences.
const SAMPLE_STREAM: u64 = 0;
const INJECT_STREAM: u64 = 1;

/// A dense `n × dim` point matrix plus the bookkeeping needed to audit how it
/// was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    dim: usize,
    feature_names: Vec<String>,
    scaled: bool,
    injected_outlier_indices: BTreeSet<usize>,
    source_row_indices: Vec<usize>,
    seed: u64,
}

/// Sidecar metadata written next to an exported CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub seed: u64,
    pub scaled: bool,
    pub injected_outlier_indices: Vec<usize>,
    pub source_row_indices: Vec<usize>,
}

impl Dataset {
    /// Builds an unscaled dataset from rows. Every row must have
    /// `feature_names.len()` finite entries.
    pub fn from_rows<S: Into<String>>(
        feature_names: impl IntoIterator<Item = S>,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        let feature_names: Vec<String> = feature_names.into_iter().map(Into::into).collect();
        let dim = feature_names.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("at least one feature is required".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} values, expected {dim}",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::BadCell {
                        row: i + 1,
                        column: feature_names[j].clone(),
                        value: x.to_string(),
                    });
                }
            }
            values.extend_from_slice(row);
        }
        Ok(Dataset {
            values,
            dim,
            feature_names,
            scaled: false,
            injected_outlier_indices: BTreeSet::new(),
            source_row_indices: (0..rows.len()).collect(),
            seed: 0,
        })
    }

    /// Convenience constructor for one-dimensional point sets.
    pub fn from_1d(points: &[f64]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = points.iter().map(|&x| vec![x]).collect();
        Dataset::from_rows(["x"], &rows)
    }

    pub fn len(&self) -> usize {
        self.source_row_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.points().map(move |p| p[j])
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn injected_outlier_indices(&self) -> &BTreeSet<usize> {
        &self.injected_outlier_indices
    }

    /// Row index of each point in the originally loaded file.
    pub fn source_row_indices(&self) -> &[usize] {
        &self.source_row_indices
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn meta(&self) -> DatasetMeta {
        DatasetMeta {
            seed: self.seed,
            scaled: self.scaled,
            injected_outlier_indices: self.injected_outlier_indices.iter().copied().collect(),
            source_row_indices: self.source_row_indices.clone(),
        }
    }

    /// The points at `indices` (in the given order), with audit data carried over.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let mut values = Vec::with_capacity(indices.len() * self.dim);
        let mut injected = BTreeSet::new();
        let mut source = Vec::with_capacity(indices.len());
        for (new, &old) in indices.iter().enumerate() {
            if old >= self.len() {
                return Err(Error::InvalidParameter(format!(
                    "index {old} out of range for {} points",
                    self.len()
                )));
            }
            values.extend_from_slice(self.point(old));
            source.push(self.source_row_indices[old]);
            if self.injected_outlier_indices.contains(&old) {
                injected.insert(new);
            }
        }
        Ok(Dataset {
            values,
            dim: self.dim,
            feature_names: self.feature_names.clone(),
            scaled: self.scaled,
            injected_outlier_indices: injected,
            source_row_indices: source,
            seed: self.seed,
        })
    }

    /// Writes the points as CSV and the audit metadata to the sidecar returned
    /// by [`sidecar_path`].
    pub fn export(&self, csv_path: impl AsRef<Path>) -> Result<()> {
        let csv_path = csv_path.as_ref();
        let mut w = csv::Writer::from_path(csv_path)?;
        w.write_record(&self.feature_names)?;
        for p in self.points() {
            w.write_record(p.iter().map(|x| x.to_string()))?;
        }
        w.flush().map_err(|e| Error::io(csv_path, e))?;

        let side = sidecar_path(csv_path);
        let f = File::create(&side).map_err(|e| Error::io(&side, e))?;
        serde_json::to_writer_pretty(f, &self.meta())?;
        Ok(())
    }

    /// Reads a dataset written by [`Dataset::export`]. All columns are used;
    /// the sidecar is optional.
    pub fn import(csv_path: impl AsRef<Path>) -> Result<Dataset> {
        let csv_path = csv_path.as_ref();
        let header = read_header(csv_path)?;
        let mut d = load_csv(csv_path, &header)?;
        let side = sidecar_path(csv_path);
        if side.exists() {
            let f = File::open(&side).map_err(|e| Error::io(&side, e))?;
            let meta: DatasetMeta = serde_json::from_reader(f)?;
            if meta.source_row_indices.len() != d.len() {
                return Err(Error::DimensionMismatch(format!(
                    "sidecar lists {} rows, CSV has {}",
                    meta.source_row_indices.len(),
                    d.len()
                )));
            }
            if let Some(&bad) = meta.injected_outlier_indices.iter().find(|&&i| i >= d.len()) {
                return Err(Error::InvalidParameter(format!(
                    "sidecar outlier index {bad} out of range"
                )));
            }
            d.seed = meta.seed;
            d.scaled = meta.scaled;
            d.injected_outlier_indices = meta.injected_outlier_indices.into_iter().collect();
            d.source_row_indices = meta.source_row_indices;
        }
        Ok(d)
    }
}

/// `data.csv` -> `data.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn read_header(path: &Path) -> Result<Vec<String>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(f);
    Ok(r.headers()?.iter().map(str::to_string).collect())
}

/// Loads the named numeric columns of a headed, comma-separated file.
///
/// Row numbers in errors are 1-based and exclude the header.
pub fn load_csv<S: AsRef<str>>(path: impl AsRef<Path>, feature_columns: &[S]) -> Result<Dataset> {
    let path = path.as_ref();
    if feature_columns.is_empty() {
        return Err(Error::InvalidParameter("no feature columns selected".into()));
    }
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(f);
    let header = reader.headers()?.clone();
    let mut cols = Vec::with_capacity(feature_columns.len());
    for name in feature_columns {
        let name = name.as_ref();
        let idx = header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        cols.push((idx, name.to_string()));
    }

    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let mut row = Vec::with_capacity(cols.len());
        for (idx, name) in &cols {
            let cell = rec.get(*idx).unwrap_or("");
            let x: f64 = cell
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| Error::BadCell {
                    row: i + 1,
                    column: name.clone(),
                    value: cell.to_string(),
                })?;
            row.push(x);
        }
        rows.push(row);
    }
    Dataset::from_rows(cols.into_iter().map(|(_, n)| n), &rows)
}

/// Per-column `(x - mean) / std` with the population standard deviation.
/// Constant columns become all zeros.
pub fn standard_scale(d: &Dataset) -> Result<Dataset> {
    if d.scaled {
        return Err(Error::AlreadyScaled);
    }
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = d.len() as f64;
    let mut out = d.clone();
    for j in 0..d.dim {
        let mean = d.column(j).sum::<f64>() / n;
        let var = d.column(j).map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        // Rounding in the mean of a constant column leaves a std of a few ulps.
        let constant = std <= 1e-12 * mean.abs().max(1.0);
        for i in 0..d.len() {
            let x = &mut out.values[i * d.dim + j];
            *x = if constant { 0.0 } else { (*x - mean) / std };
        }
    }
    out.scaled = true;
    Ok(out)
}

/// Uniform sample of `size` points without replacement. Chosen rows keep their
/// relative order, so `size == n` returns the dataset unchanged.
pub fn sample_points(d: &Dataset, size: usize, seed: u64) -> Result<Dataset> {
    if size == 0 || size > d.len() {
        return Err(Error::InvalidParameter(format!(
            "sample size {size} must be in 1..={}",
            d.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SAMPLE_STREAM);
    let mut chosen = index::sample(&mut rng, d.len(), size).into_vec();
    chosen.sort_unstable();
    let mut out = d.subset(&chosen)?;
    out.seed = seed;
    Ok(out)
}

/// `⌈fraction · n⌉`, at least 1 for any positive fraction and at most `n`.
pub fn ceil_count(fraction: f64, n: usize) -> usize {
    if fraction <= 0.0 || n == 0 {
        return 0;
    }
    let raw = fraction * n as f64;
    // 0.07 * 100 evaluates to 7.000000000000001
    let count = if (raw - raw.round()).abs() < 1e-9 {
        raw.round()
    } else {
        raw.ceil()
    };
    (count as usize).clamp(1, n)
}

/// Perturbs `⌈fraction · n⌉` random points by adding `Uniform(0, col_max)`
/// noise to every feature, where `col_max` is the column maximum before
/// injection. Points are drawn first, then noise point by point in column order.
pub fn inject_outliers(d: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !d.scaled {
        return Err(Error::NotScaled);
    }
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!(
            "outlier fraction {fraction} not in [0, 1]"
        )));
    }
    let mut out = d.clone();
    out.seed = seed;
    let count = ceil_count(fraction, d.len());
    if count == 0 {
        return Ok(out);
    }
    let col_max: Vec<f64> = (0..d.dim)
        .map(|j| d.column(j).fold(f64::NEG_INFINITY, f64::max))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INJECT_STREAM);
    let mut chosen = index::sample(&mut rng, d.len(), count).into_vec();
    chosen.sort_unstable();
    for &i in &chosen {
        for (j, &hi) in col_max.iter().enumerate() {
            // A non-positive maximum only happens for an all-zero (constant) column.
            let noise = if hi > 0.0 { rng.gen_range(0.0..=hi) } else { 0.0 };
            out.values[i * d.dim + j] += noise;
        }
        out.injected_outlier_indices.insert(i);
    }
    Ok(out)
}
