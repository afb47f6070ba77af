//! Dense binary-classification datasets, class partitions, splits and
//! hyperplanes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Class label, always `-1` or `+1`.
pub type Label = i8;

pub const POSITIVE: Label = 1;
pub const NEGATIVE: Label = -1;

/// Row-major `n x p` sample matrix with ±1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<f64>,
    labels: Vec<Label>,
    n_features: usize,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    /// Build a dataset from a flat row-major buffer.
    pub fn new(samples: Vec<f64>, n_features: usize, labels: Vec<Label>) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::Empty("feature dimension"));
        }
        if labels.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        if samples.len() != labels.len() * n_features {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * n_features,
                found: samples.len(),
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("samples"));
        }
        validate_labels(&labels)?;
        Ok(Self {
            samples,
            labels,
            n_features,
            feature_names: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<Label>) -> Result<Self> {
        let p = rows.first().map(Vec::len).unwrap_or(0);
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        let mut samples = Vec::with_capacity(rows.len() * p);
        for row in rows {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    found: row.len(),
                });
            }
            samples.extend_from_slice(row);
        }
        Self::new(samples, p, labels)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: names.len(),
            });
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    #[inline]
    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.samples[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.samples.chunks_exact(self.n_features)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Names to use when writing the dataset out: the stored names, or
    /// `f0..f{p-1}`.
    pub fn column_names(&self) -> Vec<String> {
        match &self.feature_names {
            Some(names) => names.clone(),
            None => (0..self.n_features).map(|j| format!("f{j}")).collect(),
        }
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&y| y == POSITIVE).count();
        (pos, self.labels.len() - pos)
    }

    /// A new dataset holding the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Empty("row selection"));
        }
        let mut samples = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n_samples() {
                return Err(Error::DimensionMismatch {
                    expected: self.n_samples(),
                    found: i,
                });
            }
            samples.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Ok(Self {
            samples,
            labels,
            n_features: self.n_features,
            feature_names: self.feature_names.clone(),
        })
    }

    /// Replace the features, keeping labels. Used by feature maps.
    pub fn with_samples(&self, samples: Vec<f64>, n_features: usize) -> Result<Self> {
        Self::new(samples, n_features, self.labels.clone())
    }

    /// Same samples with every label negated.
    pub fn flipped(&self) -> Self {
        let mut out = self.clone();
        for y in &mut out.labels {
            *y = -*y;
        }
        out
    }
}

fn validate_labels(labels: &[Label]) -> Result<()> {
    for (index, &y) in labels.iter().enumerate() {
        if y != POSITIVE && y != NEGATIVE {
            return Err(Error::InvalidLabel {
                index,
                value: y as i64,
            });
        }
    }
    Ok(())
}

/// Indices of each class, in original order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
}

impl ClassPartition {
    pub fn n_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn n_negative(&self) -> usize {
        self.negative.len()
    }

    /// Rebuild the label vector the partition was taken from.
    pub fn to_labels(&self) -> Vec<Label> {
        let mut labels = vec![0; self.positive.len() + self.negative.len()];
        for &i in &self.positive {
            labels[i] = POSITIVE;
        }
        for &i in &self.negative {
            labels[i] = NEGATIVE;
        }
        labels
    }
}

pub fn class_partition(labels: &[Label]) -> Result<ClassPartition> {
    if labels.is_empty() {
        return Err(Error::Empty("labels"));
    }
    validate_labels(labels)?;
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (i, &y) in labels.iter().enumerate() {
        if y == POSITIVE {
            positive.push(i);
        } else {
            negative.push(i);
        }
    }
    if positive.is_empty() || negative.is_empty() {
        return Err(Error::SingleClass {
            positives: positive.len(),
            negatives: negative.len(),
        });
    }
    Ok(ClassPartition { positive, negative })
}

/// Affine decision boundary `w·x + theta = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub w: Vec<f64>,
    pub theta: f64,
}

impl Hyperplane {
    pub fn new(w: Vec<f64>, theta: f64) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Empty("weight vector"));
        }
        if w.iter().any(|v| !v.is_finite()) || !theta.is_finite() {
            return Err(Error::NonFinite("hyperplane"));
        }
        Ok(Self { w, theta })
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn norm(&self) -> f64 {
        dot(&self.w, &self.w).sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        self.w.iter().all(|&v| v == 0.0)
    }

    /// `w·x + theta` without a dimension check.
    #[inline]
    pub fn score(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) + self.theta
    }

    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::DimensionMismatch {
                expected: self.w.len(),
                found: x.len(),
            });
        }
        Ok(self.score(x))
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        self.decision_value(x).map(class_of)
    }
}

/// Free-function form of [`Hyperplane::decision_value`].
pub fn decision_value(h: &Hyperplane, x: &[f64]) -> Result<f64> {
    h.decision_value(x)
}

/// Class for a decision value; zero goes to the positive class.
#[inline]
pub fn class_of(value: f64) -> Label {
    if value >= 0.0 {
        POSITIVE
    } else {
        NEGATIVE
    }
}

/// Sequential dot product. The summation order is fixed so results are
/// reproducible bit for bit.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Train/test index lists, each ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
}

impl Split {
    pub fn train(&self, d: &Dataset) -> Result<Dataset> {
        d.select(&self.train_indices)
    }

    pub fn test(&self, d: &Dataset) -> Result<Dataset> {
        d.select(&self.test_indices)
    }
}

/// Seeded shuffle, then the first `round(test_fraction * n)` shuffled
/// indices form the test side.
pub fn split_dataset(d: &Dataset, test_fraction: f64, seed: u64) -> Result<Split> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test_fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let n = d.n_samples();
    if n < 2 {
        return Err(Error::DegenerateSplit(format!(
            "need at least 2 rows, got {n}"
        )));
    }
    let n_test = (test_fraction * n as f64).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::DegenerateSplit(format!(
            "fraction {test_fraction} of {n} rows leaves an empty side"
        )));
    }
    let perm = SeededRng::new(seed).permutation(n);
    let mut test_indices = perm[..n_test].to_vec();
    let mut train_indices = perm[n_test..].to_vec();
    test_indices.sort_unstable();
    train_indices.sort_unstable();

    for (side, idx) in [("train", &train_indices), ("test", &test_indices)] {
        let pos = idx.iter().filter(|&&i| d.labels()[i] == POSITIVE).count();
        if pos == 0 || pos == idx.len() {
            return Err(Error::DegenerateSplit(format!(
                "{side} side has a single class ({pos} positive of {})",
                idx.len()
            )));
        }
    }
    Ok(Split {
        train_indices,
        test_indices,
        seed,
    })
}
