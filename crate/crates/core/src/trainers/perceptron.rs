//! Single-sample perceptron with optional pocket retention.
//!
//! Rows are visited cyclically in one seeded permutation; every row with
//! `y (w·x + θ) <= 0` applies `w += y x, θ += y`. In pocket mode the iterate with the fewest
//! training errors is kept, using the ratchet rule: a candidate is only
//! re-counted when its current run of consecutive correct predictions is
//! longer than the pocketed one's.

use serde::{Deserialize, Serialize};

use crate::dataset::{class_of, class_partition, dot, Dataset, Hyperplane};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerceptronConfig {
    pub max_updates: usize,
    pub pocket: bool,
    pub seed: u64,
}

impl Default for PerceptronConfig {
    fn default() -> Self {
        Self {
            max_updates: 1_000_000,
            pocket: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronFit {
    pub hyperplane: Hyperplane,
    pub updates_used: usize,
    pub training_errors: usize,
    /// Error count of each newly pocketed iterate, in order.
    pub pocket_history: Vec<usize>,
}

fn count_errors(d: &Dataset, w: &[f64], theta: f64) -> usize {
    d.rows()
        .zip(d.labels())
        .filter(|(x, &y)| class_of(dot(w, x) + theta) != y)
        .count()
}

pub fn perceptron_train(d: &Dataset, cfg: &PerceptronConfig) -> Result<(Hyperplane, usize)> {
    let fit = perceptron_fit(d, cfg)?;
    Ok((fit.hyperplane, fit.updates_used))
}

pub fn perceptron_fit(d: &Dataset, cfg: &PerceptronConfig) -> Result<PerceptronFit> {
    if cfg.max_updates == 0 {
        return Err(Error::InvalidConfig(
            "perceptron.max_updates must be at least 1".into(),
        ));
    }
    class_partition(d.labels())?;
    let n = d.n_samples();
    let order = SeededRng::new(cfg.seed).permutation(n);

    let mut w = vec![0.0; d.n_features()];
    let mut theta = 0.0;
    let mut updates = 0usize;
    let mut run = 0usize;
    // (weights, bias, errors, run length when pocketed)
    let mut pocket: Option<(Vec<f64>, f64, usize, usize)> = None;
    let mut history = Vec::new();
    let mut pos = 0usize;

    while updates < cfg.max_updates && run < n {
        let i = order[pos];
        pos = if pos + 1 == n { 0 } else { pos + 1 };
        let x = d.row(i);
        let y = d.labels()[i];
        if y as f64 * (dot(&w, x) + theta) > 0.0 {
            run += 1;
            continue;
        }
        if cfg.pocket && updates > 0 && pocket.as_ref().map_or(true, |pk| run > pk.3) {
            let errors = count_errors(d, &w, theta);
            if pocket.as_ref().map_or(true, |pk| errors < pk.2) {
                history.push(errors);
                pocket = Some((w.clone(), theta, errors, run));
            }
        }
        let yf = y as f64;
        for (wj, xj) in w.iter_mut().zip(x) {
            *wj += yf * xj;
        }
        theta += yf;
        updates += 1;
        run = 0;
    }

    let final_errors = if run >= n {
        0
    } else {
        count_errors(d, &w, theta)
    };
    let (w, theta, errors) = match pocket {
        Some((pw, pt, pe, _)) if cfg.pocket && pe <= final_errors => (pw, pt, pe),
        _ => {
            if cfg.pocket && history.last().map_or(true, |&e| final_errors < e) {
                history.push(final_errors);
            }
            (w, theta, final_errors)
        }
    };
    Ok(PerceptronFit {
        hyperplane: Hyperplane::new(w, theta)?,
        updates_used: updates,
        training_errors: errors,
        pocket_history: history,
    })
}
