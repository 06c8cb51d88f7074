//! Labelled datasets: synthetic blobs, CSV ingestion, splitting and scaling.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Feature matrix (row-major) with 1-based class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    y: Vec<usize>,
    n_features: usize,
    n_classes: usize,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    /// Labels must lie in `1..=n_classes`. Not every class has to be
    /// present, which allows test splits that miss a rare class.
    pub fn new(x: Vec<f64>, y: Vec<usize>, n_features: usize, n_classes: usize) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::InvalidDataset("need at least one feature".into()));
        }
        if y.is_empty() {
            return Err(Error::InvalidDataset("need at least one sample".into()));
        }
        if x.len() != y.len() * n_features {
            return Err(Error::InvalidDataset(format!(
                "{} feature values for {} samples of dimension {}",
                x.len(),
                y.len(),
                n_features
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature matrix"));
        }
        if let Some(&bad) = y.iter().find(|&&l| l == 0 || l > n_classes) {
            return Err(Error::InvalidDataset(format!("label {bad} outside 1..={n_classes}")));
        }
        Ok(Dataset {
            x,
            y,
            n_features,
            n_classes,
            feature_names: None,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        check_dim(self.n_features, names.len())?;
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn features(&self) -> &[f64] {
        &self.x
    }

    pub fn labels(&self) -> &[usize] {
        &self.y
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.n_features)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.y {
            counts[l - 1] += 1;
        }
        counts
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut x = Vec::with_capacity(indices.len() * self.n_features);
        let mut y = Vec::with_capacity(indices.len());
        for &i in indices {
            x.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        Dataset {
            x,
            y,
            n_features: self.n_features,
            n_classes: self.n_classes,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Axis-aligned bounding box of all samples.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.n_features];
        let mut hi = vec![f64::NEG_INFINITY; self.n_features];
        for row in self.rows() {
            for (i, &v) in row.iter().enumerate() {
                lo[i] = lo[i].min(v);
                hi[i] = hi[i].max(v);
            }
        }
        (lo, hi)
    }

    fn map_features(&self, f: impl Fn(usize, f64) -> f64) -> Dataset {
        let n = self.n_features;
        let x = self.x.iter().enumerate().map(|(idx, &v)| f(idx % n, v)).collect();
        Dataset { x, ..self.clone() }
    }
}

/// Isotropic Gaussian blobs around `centers` points drawn uniformly from
/// `[-10, 10]^n`. Centers are assigned to classes round-robin; class sizes
/// differ by at most one and each class spreads its samples evenly over its
/// centers. The result is shuffled.
pub fn make_blobs(
    n_samples: usize,
    n_features: usize,
    centers: usize,
    cluster_std: f64,
    n_classes: usize,
    seed: u64,
) -> Result<Dataset> {
    if n_classes < 2 || centers < n_classes {
        return Err(Error::InvalidConfig(format!(
            "need centers >= classes >= 2 (centers={centers}, classes={n_classes})"
        )));
    }
    if n_features == 0 || n_samples < centers {
        return Err(Error::InvalidConfig(format!(
            "need features >= 1 and samples >= centers (features={n_features}, samples={n_samples})"
        )));
    }
    if !(cluster_std >= 0.0 && cluster_std.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "cluster std must be finite and non-negative, got {cluster_std}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center_coords: Vec<f64> = (0..centers * n_features)
        .map(|_| rng.random_range(-10.0..10.0))
        .collect();
    let noise = Normal::new(0.0, cluster_std).expect("std validated above");

    // Balance classes first, then spread each class over its own centers.
    let mut per_center = vec![0usize; centers];
    for s in 0..n_classes {
        let class_total = n_samples / n_classes + usize::from(s < n_samples % n_classes);
        let owned: Vec<usize> = (s..centers).step_by(n_classes).collect();
        for (j, &c) in owned.iter().enumerate() {
            per_center[c] = class_total / owned.len() + usize::from(j < class_total % owned.len());
        }
    }

    let mut samples: Vec<(Vec<f64>, usize)> = Vec::with_capacity(n_samples);
    for (c, &count) in per_center.iter().enumerate() {
        let center = &center_coords[c * n_features..(c + 1) * n_features];
        for _ in 0..count {
            let point = center
                .iter()
                .map(|&m| {
                    if cluster_std == 0.0 {
                        m
                    } else {
                        m + noise.sample(&mut rng)
                    }
                })
                .collect();
            samples.push((point, c % n_classes + 1));
        }
    }
    samples.shuffle(&mut rng);

    let (x, y): (Vec<Vec<f64>>, Vec<usize>) = samples.into_iter().unzip();
    Dataset::new(x.concat(), y, n_features, n_classes)
}

/// Reads a headered CSV whose `label_column` holds integer labels `1..=S`.
/// Every label in that range must occur. Error coordinates are 1-based file
/// line and column numbers (the header is line 1).
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            column: 0,
            message: e.to_string(),
        })?
        .clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::InvalidDataset(format!("label column {label_column:?} not found in header")))?;
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.to_string())
        .collect();
    let n_features = names.len();

    let mut x = Vec::new();
    let mut y = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            column: 0,
            message: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != headers.len() {
            return Err(Error::Parse {
                row,
                column: record.len() + 1,
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        for (col, cell) in record.iter().enumerate() {
            if col == label_idx {
                let label: usize = cell.parse().map_err(|_| Error::Parse {
                    row,
                    column: col + 1,
                    message: format!("label {cell:?} is not a positive integer"),
                })?;
                y.push(label);
            } else {
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    row,
                    column: col + 1,
                    message: format!("{cell:?} is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        row,
                        column: col + 1,
                        message: "non-finite value".into(),
                    });
                }
                x.push(v);
            }
        }
    }

    let n_classes = y.iter().copied().max().unwrap_or(0);
    let ds = Dataset::new(x, y, n_features, n_classes)?;
    if let Some(missing) = ds.class_counts().iter().position(|&c| c == 0) {
        return Err(Error::InvalidDataset(format!(
            "labels must cover 1..={n_classes}; label {} is missing",
            missing + 1
        )));
    }
    ds.with_feature_names(names)
}

/// Writes features then a `label` column. Values use the shortest decimal
/// representation that reads back to the same `f64`.
pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    let header: Vec<String> = match ds.feature_names() {
        Some(names) => names.to_vec(),
        None => (1..=ds.n_features).map(|i| format!("x{i}")).collect(),
    };
    writeln!(out, "{},label", header.join(",")).map_err(io)?;
    for (row, label) in ds.rows().zip(&ds.y) {
        for v in row {
            write!(out, "{v},").map_err(io)?;
        }
        writeln!(out, "{label}").map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Splits into `(train, test)`. Rows keep their original relative order.
pub fn train_test_split(ds: &Dataset, test_fraction: f64, seed: u64, stratified: bool) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_test = vec![false; ds.len()];

    if stratified {
        let counts = ds.class_counts();
        if let Some(s) = counts.iter().position(|&c| c == 1) {
            return Err(Error::InvalidDataset(format!(
                "class {} has a single sample and cannot be stratified",
                s + 1
            )));
        }
        let quotas = stratified_quotas(&counts, test_fraction, ds.len());
        for (s, &quota) in quotas.iter().enumerate() {
            let mut members: Vec<usize> = (0..ds.len()).filter(|&i| ds.y[i] == s + 1).collect();
            members.shuffle(&mut rng);
            for &i in &members[..quota] {
                is_test[i] = true;
            }
        }
    } else {
        let n_test = ((ds.len() as f64 * test_fraction).round() as usize).clamp(1, ds.len() - 1);
        let mut order: Vec<usize> = (0..ds.len()).collect();
        order.shuffle(&mut rng);
        for &i in &order[..n_test] {
            is_test[i] = true;
        }
    }

    let (test_idx, train_idx): (Vec<usize>, Vec<usize>) = (0..ds.len()).partition(|&i| is_test[i]);
    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(Error::InvalidDataset("split leaves an empty partition".into()));
    }
    Ok((ds.subset(&train_idx), ds.subset(&test_idx)))
}

/// Largest-remainder apportionment of `round(total * fraction)` test rows
/// across classes, leaving at least one training row per class.
fn stratified_quotas(counts: &[usize], fraction: f64, total: usize) -> Vec<usize> {
    let target = (total as f64 * fraction).round() as usize;
    let exact: Vec<f64> = counts.iter().map(|&c| c as f64 * fraction).collect();
    let mut quotas: Vec<usize> = exact
        .iter()
        .zip(counts)
        .map(|(&e, &c)| (e.floor() as usize).min(c.saturating_sub(1)))
        .collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&p, &q| {
        let rp = exact[p] - exact[p].floor();
        let rq = exact[q] - exact[q].floor();
        rq.total_cmp(&rp).then(p.cmp(&q))
    });
    let mut assigned: usize = quotas.iter().sum();
    for &s in order.iter().cycle().take(order.len() * 2) {
        if assigned >= target {
            break;
        }
        if quotas[s] + 1 < counts[s] && (quotas[s] as f64) < exact[s].ceil() {
            quotas[s] += 1;
            assigned += 1;
        }
    }
    quotas
}

/// Per-feature standardisation fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub const STD_FLOOR: f64 = 1e-12;

pub fn fit_scaler(ds: &Dataset) -> Scaler {
    let n = ds.n_features;
    let m = ds.len() as f64;
    let mut mean = vec![0.0; n];
    for row in ds.rows() {
        for (mu, v) in mean.iter_mut().zip(row) {
            *mu += v;
        }
    }
    mean.iter_mut().for_each(|mu| *mu /= m);
    let mut var = vec![0.0; n];
    for row in ds.rows() {
        for i in 0..n {
            var[i] += (row[i] - mean[i]).powi(2);
        }
    }
    let std = var.iter().map(|v| (v / m).sqrt().max(STD_FLOOR)).collect();
    Scaler { mean, std }
}

impl Scaler {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform_row(&self, row: &mut [f64]) {
        for (i, v) in row.iter_mut().enumerate() {
            *v = (*v - self.mean[i]) / self.std[i];
        }
    }
}

pub fn apply_scaler(ds: &Dataset, scaler: &Scaler) -> Result<Dataset> {
    check_dim(scaler.dim(), ds.n_features)?;
    Ok(ds.map_features(|i, v| (v - scaler.mean[i]) / scaler.std[i]))
}

pub fn inverse_scaler(ds: &Dataset, scaler: &Scaler) -> Result<Dataset> {
    check_dim(scaler.dim(), ds.n_features)?;
    Ok(ds.map_features(|i, v| v * scaler.std[i] + scaler.mean[i]))
}
