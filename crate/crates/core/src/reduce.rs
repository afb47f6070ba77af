//! Keep the instances closest to a hyperplane.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Hyperplane, POSITIVE};
use crate::error::{Error, Result};

/// Which instances count as "close".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closeness {
    /// The `ceil(f * n)` nearest instances.
    KeepFraction(f64),
    /// Every instance within this normalized distance.
    BandWidth(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReductionPolicy {
    pub rule: Closeness,
    pub min_per_class: usize,
}

impl Default for ReductionPolicy {
    fn default() -> Self {
        Self {
            rule: Closeness::KeepFraction(0.2),
            min_per_class: 10,
        }
    }
}

impl ReductionPolicy {
    pub fn keep_fraction(f: f64) -> Self {
        Self {
            rule: Closeness::KeepFraction(f),
            ..Default::default()
        }
    }

    pub fn with_min_per_class(mut self, m: usize) -> Self {
        self.min_per_class = m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.rule {
            Closeness::KeepFraction(f) if !(f > 0.0 && f <= 1.0) => Err(Error::InvalidConfig(
                format!("keep_fraction must lie in (0, 1], got {f}"),
            )),
            Closeness::BandWidth(b) if !(b > 0.0 && b.is_finite()) => Err(Error::InvalidConfig(
                format!("band_width must be positive, got {b}"),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSelection {
    /// Ascending row indices into the reduced dataset.
    pub indices: Vec<usize>,
    pub n_positive: usize,
    pub n_negative: usize,
    /// Normalized distance of each selected row, aligned with `indices`.
    pub distances: Vec<f64>,
}

/// `|w·x_i + θ| / ‖w‖₂` for every row.
pub fn hyperplane_distance(h: &Hyperplane, d: &Dataset) -> Result<Vec<f64>> {
    if h.is_degenerate() {
        return Err(Error::DegenerateHyperplane);
    }
    if h.dim() != d.n_features() {
        return Err(Error::DimensionMismatch {
            expected: d.n_features(),
            found: h.dim(),
        });
    }
    let norm = h.norm();
    Ok(d.rows().map(|x| h.score(x).abs() / norm).collect())
}

fn by_distance(dist: &[f64]) -> impl Fn(&usize, &usize) -> std::cmp::Ordering + '_ {
    move |&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b))
}

pub fn extract_subset(
    d: &Dataset,
    h: &Hyperplane,
    policy: &ReductionPolicy,
) -> Result<SubsetSelection> {
    policy.validate()?;
    let dist = hyperplane_distance(h, d)?;
    let n = d.n_samples();
    let mut selected = vec![false; n];

    match policy.rule {
        Closeness::KeepFraction(f) => {
            let k = ((f * n as f64).ceil() as usize).min(n);
            if k < 2 {
                return Err(Error::InvalidConfig(format!(
                    "keep_fraction {f} of {n} rows keeps fewer than 2"
                )));
            }
            let mut order: Vec<usize> = (0..n).collect();
            if k < n {
                order.select_nth_unstable_by(k - 1, by_distance(&dist));
            }
            for &i in &order[..k] {
                selected[i] = true;
            }
        }
        Closeness::BandWidth(b) => {
            for (s, &di) in selected.iter_mut().zip(&dist) {
                *s = di <= b;
            }
        }
    }

    // Per-class floor: top up each class with its nearest unselected members.
    if policy.min_per_class > 0 {
        for class in [POSITIVE, -POSITIVE] {
            let members = || (0..n).filter(move |&i| d.labels()[i] == class);
            let have = members().filter(|&i| selected[i]).count();
            if have >= policy.min_per_class {
                continue;
            }
            let mut spare: Vec<usize> = members().filter(|&i| !selected[i]).collect();
            spare.sort_unstable_by(by_distance(&dist));
            for &i in spare.iter().take(policy.min_per_class - have) {
                selected[i] = true;
            }
        }
    }

    let indices: Vec<usize> = (0..n).filter(|&i| selected[i]).collect();
    if indices.is_empty() {
        return Err(Error::EmptySelection);
    }
    let n_positive = indices
        .iter()
        .filter(|&&i| d.labels()[i] == POSITIVE)
        .count();
    Ok(SubsetSelection {
        n_negative: indices.len() - n_positive,
        n_positive,
        distances: indices.iter().map(|&i| dist[i]).collect(),
        indices,
    })
}
