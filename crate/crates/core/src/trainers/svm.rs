//! Primal linear SVM trained by stochastic subgradient descent on
//!
//! ```text
//! (λ/2)‖w‖² + (1/n) Σ max(0, 1 - y_i (w·x_i + θ))
//! ```
//!
//! with step `η_t = 1 / (λ t)`, each step followed by projection of `w` onto
//! the ball `‖w‖ <= 1/√λ`, which contains the optimum. The bias is
//! unregularized, follows the same steps and is not projected. Each epoch visits the rows in a fresh seeded permutation.
//! The returned model is the average of the iterates over the second half
//! of all steps; the earliest iterates have steps of order `1/λ` and would
//! dominate a full average. The objective of the starting point (`w = 0`)
//! and of the raw iterate after every epoch is tracked; if the average is
//! worse than the start, or more than [`AVERAGE_SLACK`] above the best
//! tracked point, that point is returned instead.

use serde::{Deserialize, Serialize};

use crate::dataset::{class_partition, dot, Dataset, Hyperplane};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub reg_lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            reg_lambda: 1e-4,
            epochs: 20,
            seed: 0,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.reg_lambda > 0.0 && self.reg_lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "svm.reg_lambda must be positive, got {}",
                self.reg_lambda
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("svm.epochs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Relative slack allowed between the averaged model and the best tracked
/// iterate.
pub const AVERAGE_SLACK: f64 = 0.05;

/// Training output with the per-epoch objective trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmFit {
    pub hyperplane: Hyperplane,
    /// Objective of the raw iterate at the end of each epoch.
    pub epoch_objectives: Vec<f64>,
    /// Objective of the returned model.
    pub objective: f64,
    /// Whether the returned model is the averaged iterate.
    pub averaged: bool,
}

/// Regularized hinge objective of `h` on `d`.
pub fn svm_objective(d: &Dataset, h: &Hyperplane, reg_lambda: f64) -> f64 {
    let hinge: f64 = d
        .rows()
        .zip(d.labels())
        .map(|(x, &y)| (1.0 - y as f64 * h.score(x)).max(0.0))
        .sum();
    0.5 * reg_lambda * dot(&h.w, &h.w) + hinge / d.n_samples() as f64
}

pub fn svm_train(d: &Dataset, cfg: &SvmConfig) -> Result<Hyperplane> {
    svm_train_traced(d, cfg).map(|fit| fit.hyperplane)
}

/// Like [`svm_train`], also returning the objective trace.
pub fn svm_train_traced(d: &Dataset, cfg: &SvmConfig) -> Result<SvmFit> {
    cfg.validate()?;
    class_partition(d.labels())?;
    let n = d.n_samples();
    let p = d.n_features();
    let lambda = cfg.reg_lambda;
    let radius_sq = 1.0 / lambda;
    let total_steps = n * cfg.epochs;
    let average_from = total_steps / 2 + 1;

    let mut rng = SeededRng::new(cfg.seed);
    let mut w = vec![0.0; p];
    let mut theta = 0.0;
    let mut w_sum = vec![0.0; p];
    let mut theta_sum = 0.0;
    let mut averaged = 0usize;
    let mut epoch_objectives = Vec::with_capacity(cfg.epochs);
    let start = Hyperplane::new(vec![0.0; p], 0.0)?;
    let mut best = (svm_objective(d, &start, lambda), start);
    let initial_objective = best.0;
    let mut t = 0usize;

    for _ in 0..cfg.epochs {
        let order = rng.permutation(n);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let x = d.row(i);
            let y = d.labels()[i] as f64;
            let margin = y * (dot(&w, x) + theta);
            let shrink = 1.0 - eta * lambda;
            if margin < 1.0 {
                let step = eta * y;
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj = shrink * *wj + step * xj;
                }
                theta += step;
            } else {
                for wj in &mut w {
                    *wj *= shrink;
                }
            }
            let norm_sq = dot(&w, &w);
            if norm_sq > radius_sq {
                let scale = (radius_sq / norm_sq).sqrt();
                for wj in &mut w {
                    *wj *= scale;
                }
            }
            if t >= average_from {
                for (s, wj) in w_sum.iter_mut().zip(&w) {
                    *s += wj;
                }
                theta_sum += theta;
                averaged += 1;
            }
        }
        let current = Hyperplane::new(w.clone(), theta)?;
        let obj = svm_objective(d, &current, lambda);
        epoch_objectives.push(obj);
        if obj < best.0 {
            best = (obj, current);
        }
    }

    let k = averaged as f64;
    let average = Hyperplane::new(w_sum.iter().map(|s| s / k).collect(), theta_sum / k)?;
    let avg_objective = svm_objective(d, &average, lambda);
    if avg_objective <= initial_objective && avg_objective <= (1.0 + AVERAGE_SLACK) * best.0 {
        Ok(SvmFit {
            hyperplane: average,
            epoch_objectives,
            objective: avg_objective,
            averaged: true,
        })
    } else {
        Ok(SvmFit {
            hyperplane: best.1,
            epoch_objectives,
            objective: best.0,
            averaged: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_linear, LinearGenSpec};

    fn margined(seed: u64) -> Dataset {
        gen_linear(&LinearGenSpec {
            n: 2000,
            p: 5,
            seed,
            margin_gap: 0.2,
        })
        .unwrap()
        .dataset
    }

    fn accuracy(d: &Dataset, h: &Hyperplane) -> f64 {
        let ok = d
            .rows()
            .zip(d.labels())
            .filter(|(x, &y)| crate::dataset::class_of(h.score(x)) == y)
            .count();
        ok as f64 / d.n_samples() as f64
    }

    #[test]
    fn separates_margined_data() {
        for seed in 0..3 {
            let d = margined(seed);
            let h = svm_train(&d, &SvmConfig::default()).unwrap();
            assert_eq!(accuracy(&d, &h), 1.0, "seed {seed}");
        }
    }

    #[test]
    fn heavy_regularization_crushes_weights() {
        let d = margined(1);
        let cfg = SvmConfig {
            reg_lambda: 1e6,
            ..Default::default()
        };
        let h = svm_train(&d, &cfg).unwrap();
        assert!(h.norm() <= 1e-2, "{}", h.norm());
    }

    /// Objective computed independently of `svm_objective`.
    fn objective_oracle(d: &Dataset, w: &[f64], theta: f64, lambda: f64) -> f64 {
        let mut loss = 0.0;
        for i in 0..d.n_samples() {
            let mut s = theta;
            for (wj, xj) in w.iter().zip(d.row(i)) {
                s += wj * xj;
            }
            let m = 1.0 - d.labels()[i] as f64 * s;
            if m > 0.0 {
                loss += m;
            }
        }
        lambda / 2.0 * w.iter().map(|v| v * v).sum::<f64>() + loss / d.n_samples() as f64
    }

    #[test]
    fn objective_decreases_from_zero_start() {
        let mut rng = SeededRng::new(5);
        let x: Vec<f64> = (0..600).map(|_| rng.normal()).collect();
        let y = (0..200)
            .map(|_| if rng.uniform() < 0.5 { 1 } else { -1 })
            .collect();
        let noisy = Dataset::new(x, 3, y).unwrap();
        for d in [noisy, margined(2)] {
            let cfg = SvmConfig::default();
            let h = svm_train(&d, &cfg).unwrap();
            let start = objective_oracle(&d, &[0.0; 5][..d.n_features()], 0.0, cfg.reg_lambda);
            let end = objective_oracle(&d, &h.w, h.theta, cfg.reg_lambda);
            assert!(end <= start, "{end} > {start}");
            assert!((svm_objective(&d, &h, cfg.reg_lambda) - end).abs() < 1e-9);
        }
    }

    #[test]
    fn averaged_model_close_to_best_epoch() {
        for seed in 0..4 {
            let d = margined(seed + 10);
            let fit = svm_train_traced(
                &d,
                &SvmConfig {
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            let best = fit
                .epoch_objectives
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            assert!(
                fit.objective <= 1.05 * best,
                "{} vs {}",
                fit.objective,
                best
            );
        }
    }

    #[test]
    fn deterministic_and_label_flip_symmetric() {
        let d = margined(3);
        let cfg = SvmConfig {
            seed: 9,
            ..Default::default()
        };
        let a = svm_train(&d, &cfg).unwrap();
        assert_eq!(a, svm_train(&d, &cfg).unwrap());
        let b = svm_train(&d.flipped(), &cfg).unwrap();
        for x in d.rows().take(100) {
            assert!((a.score(x) + b.score(x)).abs() <= 1e-9);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let d = Dataset::new(vec![1.0, 2.0], 1, vec![1, 1]).unwrap();
        assert!(matches!(
            svm_train(&d, &SvmConfig::default()),
            Err(Error::SingleClass { .. })
        ));
        let d = margined(0);
        let bad = SvmConfig {
            reg_lambda: 0.0,
            ..Default::default()
        };
        assert!(svm_train(&d, &bad).is_err());
    }
}
