//! In-memory datasets and the pure preprocessing steps: train/test split,
//! min-max normalization fitted on the training rows, lag-window embedding
//! of a univariate series and one-hot encoding.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::nnet::Task;

#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    /// N × output_size real targets.
    Real(Matrix),
    /// Class indices in `0..classes`.
    Labels { labels: Vec<usize>, classes: usize },
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Real(m) => m.rows(),
            Targets::Labels { labels, .. } => labels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn task(&self) -> Task {
        match self {
            Targets::Real(_) => Task::Regression,
            Targets::Labels { .. } => Task::Classification,
        }
    }

    /// Output width a network needs for these targets.
    pub fn output_size(&self) -> usize {
        match self {
            Targets::Real(m) => m.cols(),
            Targets::Labels { classes, .. } => *classes,
        }
    }

    fn select(&self, indices: &[usize]) -> Targets {
        match self {
            Targets::Real(m) => Targets::Real(m.select_rows(indices)),
            Targets::Labels { labels, classes } => Targets::Labels {
                labels: indices.iter().map(|&i| labels[i]).collect(),
                classes: *classes,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub feature_names: Vec<String>,
    pub features: Matrix,
    pub targets: Targets,
    /// Original class names in label order; empty for regression.
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        features: Matrix,
        targets: Targets,
    ) -> Result<Self> {
        if feature_names.len() != features.cols() {
            return Err(Error::shape(
                "feature names",
                features.cols(),
                feature_names.len(),
            ));
        }
        if targets.len() != features.rows() {
            return Err(Error::shape("targets", features.rows(), targets.len()));
        }
        if let Targets::Labels { labels, classes } = &targets {
            if let Some(&bad) = labels.iter().find(|&&l| l >= *classes) {
                return Err(Error::Label {
                    label: bad,
                    classes: *classes,
                });
            }
        }
        if !features.is_finite() {
            return Err(Error::Numeric("dataset features"));
        }
        Ok(Dataset {
            name: name.into(),
            feature_names,
            features,
            targets,
            class_names: Vec::new(),
        })
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Self {
        self.class_names = names;
        self
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_features(&self) -> usize {
        self.features.cols()
    }

    pub fn task(&self) -> Task {
        self.targets.task()
    }

    pub fn output_size(&self) -> usize {
        self.targets.output_size()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            feature_names: self.feature_names.clone(),
            features: self.features.select_rows(indices),
            targets: self.targets.select(indices),
            class_names: self.class_names.clone(),
        }
    }

    /// Concatenates the rows of `other` after `self`. Used for the
    /// likelihood-additivity checks.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.num_features() != other.num_features() {
            return Err(Error::shape(
                "concat features",
                self.num_features(),
                other.num_features(),
            ));
        }
        let mut feats = Vec::from(self.features.as_slice());
        feats.extend_from_slice(other.features.as_slice());
        let features = Matrix::from_vec(self.len() + other.len(), self.num_features(), feats)?;
        let targets = match (&self.targets, &other.targets) {
            (Targets::Real(a), Targets::Real(b)) if a.cols() == b.cols() => {
                let mut t = Vec::from(a.as_slice());
                t.extend_from_slice(b.as_slice());
                Targets::Real(Matrix::from_vec(a.rows() + b.rows(), a.cols(), t)?)
            }
            (
                Targets::Labels { labels: a, classes },
                Targets::Labels {
                    labels: b,
                    classes: kb,
                },
            ) if classes == kb => {
                let mut l = a.clone();
                l.extend_from_slice(b);
                Targets::Labels {
                    labels: l,
                    classes: *classes,
                }
            }
            _ => return Err(Error::config("cannot concatenate datasets of different tasks")),
        };
        Ok(Dataset {
            name: self.name.clone(),
            feature_names: self.feature_names.clone(),
            features,
            targets,
            class_names: self.class_names.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Number of training rows for a ratio: `round(ratio · n)`.
pub fn train_size(n: usize, ratio: f64) -> usize {
    (math::round(ratio * n as f64) as usize).min(n)
}

/// Splits `0..n` into train and test index lists.
///
/// Ordered splits take the leading rows as training data (time series).
/// Unordered splits shuffle with a ChaCha8 generator seeded from `seed`
/// and then cut, so both lists come out in shuffled order.
pub fn split_train_test(n: usize, ratio: f64, seed: u64, ordered: bool) -> Result<SplitIndices> {
    if n < 5 {
        return Err(Error::Insufficient(format!("split needs at least 5 rows, got {n}")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::config(format!("train ratio {ratio} not in (0, 1)")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    if !ordered {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        idx.shuffle(&mut rng);
    }
    let cut = train_size(n, ratio);
    let test = idx.split_off(cut);
    Ok(SplitIndices { train: idx, test })
}

/// Per-column affine map onto `[0, 1]` fitted on a subset of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    pub feature_min: Vec<f64>,
    pub feature_max: Vec<f64>,
    /// Present for regression targets.
    pub target_min: Vec<f64>,
    pub target_max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(data: &Dataset, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Insufficient("normalization fit rows are empty".into()));
        }
        let (feature_min, feature_max) = column_ranges(&data.features, rows);
        for (j, (lo, hi)) in feature_min.iter().zip(&feature_max).enumerate() {
            if !(hi > lo) {
                return Err(Error::ConstantColumn(data.feature_names[j].clone()));
            }
        }
        let (target_min, target_max) = match &data.targets {
            Targets::Real(t) => {
                let (lo, hi) = column_ranges(t, rows);
                for (j, (a, b)) in lo.iter().zip(&hi).enumerate() {
                    if !(b > a) {
                        return Err(Error::ConstantColumn(format!("target[{j}]")));
                    }
                }
                (lo, hi)
            }
            Targets::Labels { .. } => (Vec::new(), Vec::new()),
        };
        Ok(MinMaxScaler {
            feature_min,
            feature_max,
            target_min,
            target_max,
        })
    }

    pub fn transform(&self, data: &Dataset) -> Result<Dataset> {
        if data.num_features() != self.feature_min.len() {
            return Err(Error::shape(
                "scaler features",
                self.feature_min.len(),
                data.num_features(),
            ));
        }
        let features = scale(&data.features, &self.feature_min, &self.feature_max);
        let targets = match &data.targets {
            Targets::Real(t) => Targets::Real(scale(t, &self.target_min, &self.target_max)),
            other => other.clone(),
        };
        Ok(Dataset {
            name: data.name.clone(),
            feature_names: data.feature_names.clone(),
            features,
            targets,
            class_names: data.class_names.clone(),
        })
    }

    /// Maps normalized regression targets (or predictions) back to raw units.
    pub fn denormalize_targets(&self, t: &Matrix) -> Matrix {
        unscale(t, &self.target_min, &self.target_max)
    }

    pub fn denormalize_features(&self, x: &Matrix) -> Matrix {
        unscale(x, &self.feature_min, &self.feature_max)
    }
}

fn column_ranges(m: &Matrix, rows: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let mut lo = alloc::vec![f64::INFINITY; m.cols()];
    let mut hi = alloc::vec![f64::NEG_INFINITY; m.cols()];
    for &r in rows {
        for (j, &v) in m.row(r).iter().enumerate() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    (lo, hi)
}

fn scale(m: &Matrix, lo: &[f64], hi: &[f64]) -> Matrix {
    let mut out = m.clone();
    for r in 0..out.rows() {
        for (j, v) in out.row_mut(r).iter_mut().enumerate() {
            *v = (*v - lo[j]) / (hi[j] - lo[j]);
        }
    }
    out
}

fn unscale(m: &Matrix, lo: &[f64], hi: &[f64]) -> Matrix {
    let mut out = m.clone();
    for r in 0..out.rows() {
        for (j, v) in out.row_mut(r).iter_mut().enumerate() {
            *v = *v * (hi[j] - lo[j]) + lo[j];
        }
    }
    out
}

/// Min-max normalization fitted on `fit_on` and applied to every row.
/// Values outside the fitted range map outside `[0, 1]`; nothing is clamped.
pub fn normalize_minmax(raw: &Dataset, fit_on: &[usize]) -> Result<(Dataset, MinMaxScaler)> {
    let scaler = MinMaxScaler::fit(raw, fit_on)?;
    let data = scaler.transform(raw)?;
    Ok((data, scaler))
}

/// Lag-window embedding: sample `i` has features `s[i..i+window]` and target
/// `s[i + window + horizon - 1]`.
pub fn window_series(series: &[f64], window: usize, horizon: usize) -> Result<Dataset> {
    if window == 0 || horizon == 0 {
        return Err(Error::config("window and horizon must be at least 1"));
    }
    if series.len() < window + horizon {
        return Err(Error::Insufficient(format!(
            "series of length {} is shorter than window {window} + horizon {horizon}",
            series.len()
        )));
    }
    let count = series.len() - window - horizon + 1;
    let mut feats = Vec::with_capacity(count * window);
    let mut targets = Vec::with_capacity(count);
    for i in 0..count {
        feats.extend_from_slice(&series[i..i + window]);
        targets.push(series[i + window + horizon - 1]);
    }
    let names = (0..window).map(|k| format!("lag{}", window - k)).collect();
    Dataset::new(
        "series",
        names,
        Matrix::from_vec(count, window, feats)?,
        Targets::Real(Matrix::from_vec(count, 1, targets)?),
    )
}

/// One-hot rows for `labels` over `classes` columns.
pub fn one_hot(labels: &[usize], classes: usize) -> Result<Matrix> {
    let mut m = Matrix::zeros(labels.len(), classes);
    for (i, &l) in labels.iter().enumerate() {
        if l >= classes {
            return Err(Error::Label { label: l, classes });
        }
        m.set(i, l, 1.0);
    }
    Ok(m)
}

/// Index of the largest entry of each row; ties go to the lower index.
pub fn argmax_rows(m: &Matrix) -> Vec<usize> {
    (0..m.rows())
        .map(|r| {
            let row = m.row(r);
            let mut best = 0;
            for (j, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// A dataset split and normalized for training.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub train: Dataset,
    pub test: Dataset,
    pub split: SplitIndices,
    pub scaler: MinMaxScaler,
}

/// Splits `raw`, fits min-max normalization on the training rows and
/// returns normalized train and test sets.
pub fn prepare(raw: &Dataset, ratio: f64, seed: u64, ordered: bool) -> Result<Prepared> {
    let split = split_train_test(raw.len(), ratio, seed, ordered)?;
    let (norm, scaler) = normalize_minmax(raw, &split.train)?;
    Ok(Prepared {
        train: norm.subset(&split.train),
        test: norm.subset(&split.test),
        split,
        scaler,
    })
}
