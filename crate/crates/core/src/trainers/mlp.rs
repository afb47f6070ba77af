//! One-hidden-layer network: `tanh` hidden units, a sigmoid output, and mean
//! logistic loss, trained by full-batch gradient descent.

use serde::{Deserialize, Serialize};

use crate::dataset::{class_partition, dot, Dataset};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpConfig {
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub init_scale: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden_units: 32,
            learning_rate: 0.01,
            epochs: 30,
            seed: 0,
            init_scale: 0.1,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 {
            return Err(Error::InvalidConfig(
                "mlp.hidden_units must be at least 1".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "mlp.learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "mlp.init_scale must be positive, got {}",
                self.init_scale
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    /// Hidden weights, one row of length `p` per hidden unit.
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

/// Gradient of the mean loss, shaped like [`MlpModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradient {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(-m))` without overflow.
#[inline]
fn logistic_loss(m: f64) -> f64 {
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

impl MlpModel {
    /// Parameters drawn uniformly from `(-init_scale, init_scale)` in the
    /// order `w1` (row by row), `b1`, `w2`, `b2`.
    pub fn init(n_inputs: usize, cfg: &MlpConfig) -> Self {
        let mut rng = SeededRng::new(cfg.seed);
        let s = cfg.init_scale;
        let mut draw = || rng.uniform_in(-s, s);
        let w1 = (0..cfg.hidden_units)
            .map(|_| (0..n_inputs).map(|_| draw()).collect())
            .collect();
        let b1 = (0..cfg.hidden_units).map(|_| draw()).collect();
        let w2 = (0..cfg.hidden_units).map(|_| draw()).collect();
        let b2 = draw();
        Self { w1, b1, w2, b2 }
    }

    pub fn n_inputs(&self) -> usize {
        self.w1.first().map_or(0, Vec::len)
    }

    pub fn hidden_units(&self) -> usize {
        self.b1.len()
    }

    fn hidden(&self, x: &[f64], out: &mut [f64]) {
        for ((h, row), b) in out.iter_mut().zip(&self.w1).zip(&self.b1) {
            *h = (dot(row, x) + b).tanh();
        }
    }

    /// Output pre-activation.
    pub fn logit(&self, x: &[f64]) -> f64 {
        let mut h = vec![0.0; self.hidden_units()];
        self.hidden(x, &mut h);
        dot(&self.w2, &h) + self.b2
    }

    /// Probability of the positive class.
    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    /// Mean logistic loss over `d`.
    pub fn loss(&self, d: &Dataset) -> f64 {
        let total: f64 = d
            .rows()
            .zip(d.labels())
            .map(|(x, &y)| logistic_loss(y as f64 * self.logit(x)))
            .sum();
        total / d.n_samples() as f64
    }

    /// Mean loss and its gradient, accumulated in row order.
    pub fn loss_and_gradient(&self, d: &Dataset) -> (f64, MlpGradient) {
        let h_units = self.hidden_units();
        let p = self.n_inputs();
        let mut grad = MlpGradient {
            w1: vec![vec![0.0; p]; h_units],
            b1: vec![0.0; h_units],
            w2: vec![0.0; h_units],
            b2: 0.0,
        };
        let mut hidden = vec![0.0; h_units];
        let mut total = 0.0;
        for (x, &label) in d.rows().zip(d.labels()) {
            self.hidden(x, &mut hidden);
            let z = dot(&self.w2, &hidden) + self.b2;
            let y = label as f64;
            total += logistic_loss(y * z);
            // d/dz log(1 + exp(-y z)) = sigmoid(z) - t, t ∈ {0, 1}
            let target = if label > 0 { 1.0 } else { 0.0 };
            let dz = sigmoid(z) - target;
            grad.b2 += dz;
            for (k, &a) in hidden.iter().enumerate() {
                grad.w2[k] += dz * a;
                let da = dz * self.w2[k] * (1.0 - a * a);
                grad.b1[k] += da;
                for (g, xj) in grad.w1[k].iter_mut().zip(x) {
                    *g += da * xj;
                }
            }
        }
        let scale = 1.0 / d.n_samples() as f64;
        grad.b2 *= scale;
        for k in 0..h_units {
            grad.w2[k] *= scale;
            grad.b1[k] *= scale;
            for g in &mut grad.w1[k] {
                *g *= scale;
            }
        }
        (total * scale, grad)
    }

    fn descend(&mut self, grad: &MlpGradient, lr: f64) {
        for (row, grow) in self.w1.iter_mut().zip(&grad.w1) {
            for (w, g) in row.iter_mut().zip(grow) {
                *w -= lr * g;
            }
        }
        for (b, g) in self.b1.iter_mut().zip(&grad.b1) {
            *b -= lr * g;
        }
        for (w, g) in self.w2.iter_mut().zip(&grad.w2) {
            *w -= lr * g;
        }
        self.b2 -= lr * grad.b2;
    }

    /// All parameters in `w1`, `b1`, `w2`, `b2` order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.w1.iter().flatten().copied().collect();
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(&self.w2);
        out.push(self.b2);
        out
    }

    /// Inverse of [`MlpModel::to_flat`] for a network of this shape.
    pub fn with_flat(&self, flat: &[f64]) -> Self {
        let (h, p) = (self.hidden_units(), self.n_inputs());
        assert_eq!(flat.len(), h * p + 2 * h + 1, "parameter count");
        let w1 = flat[..h * p]
            .chunks(p.max(1))
            .map(<[f64]>::to_vec)
            .collect();
        let b1 = flat[h * p..h * p + h].to_vec();
        let w2 = flat[h * p + h..h * p + 2 * h].to_vec();
        Self {
            w1,
            b1,
            w2,
            b2: flat[h * p + 2 * h],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_flat().iter().all(|v| v.is_finite())
    }
}

impl MlpGradient {
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.w1.iter().flatten().copied().collect();
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(&self.w2);
        out.push(self.b2);
        out
    }
}

pub fn mlp_train(d: &Dataset, cfg: &MlpConfig) -> Result<MlpModel> {
    cfg.validate()?;
    class_partition(d.labels())?;
    let mut model = MlpModel::init(d.n_features(), cfg);
    for epoch in 0..cfg.epochs {
        let (loss, grad) = model.loss_and_gradient(d);
        if !loss.is_finite() {
            return Err(Error::DivergenceDetected { epoch });
        }
        model.descend(&grad, cfg.learning_rate);
        if !model.is_finite() {
            return Err(Error::DivergenceDetected { epoch });
        }
    }
    Ok(model)
}
