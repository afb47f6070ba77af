//! Barycentric correction procedure.
//!
//! Each iteration builds a hyperplane from two weighted class barycenters:
//!
//! ```text
//! b1 = Σ_{i∈I1} α_i x_i / Σ α_i        b0 = Σ_{i∈I0} μ_i x_i / Σ μ_i
//! w  = b1 - b0
//! θ  = (max_{i∈I1} γ(x_i) + min_{i∈I0} γ(x_i)) / 2,   γ(x) = -w·x
//! ```
//!
//! then adds `β` to the coefficient of every misclassified positive and `λ`
//! to every misclassified negative. The hyperplane with the fewest training
//! errors seen so far is kept (pocket retention; ties keep the earlier one).

use serde::{Deserialize, Serialize};

use crate::dataset::{
    class_of, class_partition, dot, ClassPartition, Dataset, Hyperplane, POSITIVE,
};
use crate::error::{Error, Result};

/// How the per-correction increments are derived from the class sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IncrementMode {
    /// `min{1, max[30, r]}` evaluated as written, which is always 1.
    Literal,
    /// `min(clamp_high, max(clamp_low, r))`.
    #[default]
    Clamped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BcpConfig {
    pub max_iters: usize,
    pub increment_mode: IncrementMode,
    pub clamp_low: f64,
    pub clamp_high: f64,
    pub target_errors: usize,
}

impl Default for BcpConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            increment_mode: IncrementMode::Clamped,
            clamp_low: 1.0,
            clamp_high: 30.0,
            target_errors: 0,
        }
    }
}

impl BcpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig(
                "bcp.max_iters must be at least 1".into(),
            ));
        }
        if !(self.clamp_low.is_finite() && self.clamp_high.is_finite())
            || self.clamp_low <= 0.0
            || self.clamp_low > self.clamp_high
        {
            return Err(Error::InvalidConfig(format!(
                "bcp clamp range [{}, {}] is invalid",
                self.clamp_low, self.clamp_high
            )));
        }
        Ok(())
    }
}

/// Per-instance weighting coefficients, `alpha` for positives and `mu` for
/// negatives, aligned with a [`ClassPartition`].
#[derive(Debug, Clone, PartialEq)]
pub struct BcpWeights {
    pub alpha: Vec<f64>,
    pub mu: Vec<f64>,
}

impl BcpWeights {
    pub fn uniform(part: &ClassPartition) -> Self {
        Self {
            alpha: vec![1.0; part.n_positive()],
            mu: vec![1.0; part.n_negative()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementPair {
    pub beta: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BcpResult {
    pub best_hyperplane: Hyperplane,
    pub best_error_count: usize,
    /// 1-based iteration that produced `best_hyperplane`.
    pub best_iteration: usize,
    pub iterations_run: usize,
    pub converged: bool,
    /// Training error count of every non-degenerate iteration, in order.
    pub error_history: Vec<usize>,
}

fn weighted_mean(d: &Dataset, indices: &[usize], coeffs: &[f64]) -> Result<Vec<f64>> {
    let p = d.n_features();
    let mut acc = vec![0.0; p];
    let mut mass = 0.0;
    for (&i, &c) in indices.iter().zip(coeffs) {
        mass += c;
        for (a, x) in acc.iter_mut().zip(d.row(i)) {
            *a += c * x;
        }
    }
    if mass.is_nan() || mass <= 0.0 {
        return Err(Error::ZeroMass);
    }
    for a in &mut acc {
        *a /= mass;
    }
    Ok(acc)
}

/// Weighted class barycenters `(b1, b0)`, summed in index order.
pub fn compute_barycenters(
    d: &Dataset,
    part: &ClassPartition,
    wts: &BcpWeights,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if wts.alpha.len() != part.n_positive() {
        return Err(Error::DimensionMismatch {
            expected: part.n_positive(),
            found: wts.alpha.len(),
        });
    }
    if wts.mu.len() != part.n_negative() {
        return Err(Error::DimensionMismatch {
            expected: part.n_negative(),
            found: wts.mu.len(),
        });
    }
    Ok((
        weighted_mean(d, &part.positive, &wts.alpha)?,
        weighted_mean(d, &part.negative, &wts.mu)?,
    ))
}

/// Bias from precomputed projections `w·x_i`.
fn theta_from_projections(projections: &[f64], part: &ClassPartition) -> f64 {
    // γ = -w·x, so max γ over positives is -min projection and min γ over
    // negatives is -max projection.
    let max_gamma_pos = part
        .positive
        .iter()
        .map(|&i| -projections[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let min_gamma_neg = part
        .negative
        .iter()
        .map(|&i| -projections[i])
        .fold(f64::INFINITY, f64::min);
    (max_gamma_pos + min_gamma_neg) / 2.0
}

fn projections(w: &[f64], d: &Dataset) -> Vec<f64> {
    d.rows().map(|x| dot(w, x)).collect()
}

/// Midpoint bias between the worst-placed positive and negative instances.
pub fn compute_theta(w: &[f64], d: &Dataset, part: &ClassPartition) -> Result<f64> {
    if w.len() != d.n_features() {
        return Err(Error::DimensionMismatch {
            expected: d.n_features(),
            found: w.len(),
        });
    }
    Ok(theta_from_projections(&projections(w, d), part))
}

pub fn compute_increments(
    n_positive: usize,
    n_negative: usize,
    mode: IncrementMode,
    clamp_low: f64,
    clamp_high: f64,
) -> IncrementPair {
    let ratio_pos = n_positive as f64 / n_negative as f64;
    let ratio_neg = n_negative as f64 / n_positive as f64;
    match mode {
        IncrementMode::Literal => IncrementPair {
            beta: 1.0,
            lambda: 1.0,
        },
        IncrementMode::Clamped => IncrementPair {
            beta: clamp_high.min(clamp_low.max(ratio_pos)),
            lambda: clamp_high.min(clamp_low.max(ratio_neg)),
        },
    }
}

/// Indices whose predicted class disagrees with their label, ascending.
pub fn misclassified(d: &Dataset, h: &Hyperplane) -> Result<Vec<usize>> {
    if h.dim() != d.n_features() {
        return Err(Error::DimensionMismatch {
            expected: d.n_features(),
            found: h.dim(),
        });
    }
    Ok(d.rows()
        .zip(d.labels())
        .enumerate()
        .filter(|(_, (x, &y))| class_of(h.score(x)) != y)
        .map(|(i, _)| i)
        .collect())
}

/// Outcome of one BCP iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Fitted {
        hyperplane: Hyperplane,
        misclassified: Vec<usize>,
    },
    /// The barycenters coincided; coefficients were nudged instead.
    Degenerate,
}

/// Stepwise BCP state. [`bcp_train`] drives this; it is public so callers
/// can observe coefficients between iterations.
#[derive(Debug, Clone)]
pub struct BcpRun<'a> {
    data: &'a Dataset,
    part: ClassPartition,
    weights: BcpWeights,
    increments: IncrementPair,
    // position of each row within its class list
    slot: Vec<usize>,
    iteration: usize,
    consecutive_degenerate: usize,
}

const MAX_CONSECUTIVE_DEGENERATE: usize = 3;

impl<'a> BcpRun<'a> {
    pub fn new(data: &'a Dataset, cfg: &BcpConfig) -> Result<Self> {
        cfg.validate()?;
        let part = class_partition(data.labels())?;
        let increments = compute_increments(
            part.n_positive(),
            part.n_negative(),
            cfg.increment_mode,
            cfg.clamp_low,
            cfg.clamp_high,
        );
        let mut slot = vec![0; data.n_samples()];
        for (k, &i) in part.positive.iter().enumerate() {
            slot[i] = k;
        }
        for (k, &i) in part.negative.iter().enumerate() {
            slot[i] = k;
        }
        Ok(Self {
            data,
            weights: BcpWeights::uniform(&part),
            part,
            increments,
            slot,
            iteration: 0,
            consecutive_degenerate: 0,
        })
    }

    pub fn weights(&self) -> &BcpWeights {
        &self.weights
    }

    pub fn partition(&self) -> &ClassPartition {
        &self.part
    }

    pub fn increments(&self) -> IncrementPair {
        self.increments
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Fit the hyperplane for the current coefficients.
    pub fn step(&mut self) -> Result<Step> {
        self.iteration += 1;
        let (b1, b0) = compute_barycenters(self.data, &self.part, &self.weights)?;
        let w: Vec<f64> = b1.iter().zip(&b0).map(|(a, b)| a - b).collect();

        if w.iter().all(|&v| v == 0.0) {
            self.consecutive_degenerate += 1;
            if self.consecutive_degenerate >= MAX_CONSECUTIVE_DEGENERATE {
                return Err(Error::Degenerate {
                    iteration: self.iteration,
                    consecutive: self.consecutive_degenerate,
                });
            }
            self.nudge_farthest(&b1, &b0);
            return Ok(Step::Degenerate);
        }
        self.consecutive_degenerate = 0;

        let proj = projections(&w, self.data);
        let theta = theta_from_projections(&proj, &self.part);
        let misclassified = proj
            .iter()
            .zip(self.data.labels())
            .enumerate()
            .filter(|(_, (&s, &y))| class_of(s + theta) != y)
            .map(|(i, _)| i)
            .collect();
        let hyperplane = Hyperplane::new(w, theta)?;
        Ok(Step::Fitted {
            hyperplane,
            misclassified,
        })
    }

    /// Add the class increment to the coefficient of every listed instance.
    pub fn correct(&mut self, misclassified: &[usize]) {
        for &i in misclassified {
            let k = self.slot[i];
            if self.data.labels()[i] == POSITIVE {
                self.weights.alpha[k] += self.increments.beta;
            } else {
                self.weights.mu[k] += self.increments.lambda;
            }
        }
    }

    // Escape for coinciding barycenters: +1 on the member of each class
    // farthest from its barycenter (lowest index on ties).
    fn nudge_farthest(&mut self, b1: &[f64], b0: &[f64]) {
        let farthest = |indices: &[usize], center: &[f64]| -> usize {
            let mut best = (0usize, f64::NEG_INFINITY);
            for (k, &i) in indices.iter().enumerate() {
                let dist: f64 = self
                    .data
                    .row(i)
                    .iter()
                    .zip(center)
                    .map(|(x, c)| (x - c) * (x - c))
                    .sum();
                if dist > best.1 {
                    best = (k, dist);
                }
            }
            best.0
        };
        let kp = farthest(&self.part.positive, b1);
        let kn = farthest(&self.part.negative, b0);
        self.weights.alpha[kp] += 1.0;
        self.weights.mu[kn] += 1.0;
    }
}

pub fn bcp_train(d: &Dataset, cfg: &BcpConfig) -> Result<BcpResult> {
    let mut run = BcpRun::new(d, cfg)?;
    let mut best: Option<(Hyperplane, usize, usize)> = None;
    let mut history = Vec::new();
    let mut converged = false;

    while run.iteration() < cfg.max_iters {
        let step = run.step()?;
        let (hyperplane, mis) = match step {
            Step::Fitted {
                hyperplane,
                misclassified,
            } => (hyperplane, misclassified),
            Step::Degenerate => continue,
        };
        let errors = mis.len();
        history.push(errors);
        if best.as_ref().map_or(true, |b| errors < b.1) {
            best = Some((hyperplane, errors, run.iteration()));
        }
        if errors <= cfg.target_errors {
            converged = true;
            break;
        }
        if run.iteration() < cfg.max_iters {
            run.correct(&mis);
        }
    }

    let (best_hyperplane, best_error_count, best_iteration) = best.ok_or(Error::Degenerate {
        iteration: run.iteration(),
        consecutive: run.consecutive_degenerate,
    })?;
    Ok(BcpResult {
        best_hyperplane,
        best_error_count,
        best_iteration,
        iterations_run: run.iteration(),
        converged,
        error_history: history,
    })
}
