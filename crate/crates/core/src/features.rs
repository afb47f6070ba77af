//! Random Fourier features for the Gaussian RBF kernel
//! `k(x, y) = exp(-gamma * ||x - y||^2)`.
//!
//! `z(x)_j = sqrt(2 / D) * cos(ω_j · x + b_j)` with `ω_j ~ N(0, 2γ I)` and
//! `b_j ~ U[0, 2π)`, so that `E[z(x) · z(y)] = k(x, y)`.

use serde::{Deserialize, Serialize};

use crate::dataset::{dot, Dataset};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RffParams {
    pub n_components: usize,
    pub n_features: usize,
    pub gamma: f64,
    /// Row-major `n_components x n_features`.
    pub frequencies: Vec<f64>,
    pub offsets: Vec<f64>,
    pub seed: u64,
}

/// Settings for a random-feature stage, before sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RffSpec {
    pub components: usize,
    /// Defaults to `1 / p` when absent.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl RffSpec {
    pub fn fit(&self, p: usize) -> Result<RffParams> {
        let gamma = self.gamma.unwrap_or(1.0 / p.max(1) as f64);
        rff_fit(p, self.components, gamma, self.seed)
    }
}

pub fn rff_fit(p: usize, n_components: usize, gamma: f64, seed: u64) -> Result<RffParams> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidGamma(gamma));
    }
    if p == 0 || n_components == 0 {
        return Err(Error::InvalidConfig(format!(
            "random features need p >= 1 and components >= 1, got p={p}, components={n_components}"
        )));
    }
    let mut rng = SeededRng::new(seed);
    let scale = (2.0 * gamma).sqrt();
    let frequencies = (0..n_components * p)
        .map(|_| scale * rng.normal())
        .collect();
    let offsets = (0..n_components)
        .map(|_| rng.uniform_in(0.0, std::f64::consts::TAU))
        .collect();
    Ok(RffParams {
        n_components,
        n_features: p,
        gamma,
        frequencies,
        offsets,
        seed,
    })
}

impl RffParams {
    pub fn frequency(&self, j: usize) -> &[f64] {
        &self.frequencies[j * self.n_features..(j + 1) * self.n_features]
    }

    fn transform_row(&self, x: &[f64], out: &mut [f64]) {
        let amp = (2.0 / self.n_components as f64).sqrt();
        for (j, (o, &b)) in out.iter_mut().zip(&self.offsets).enumerate() {
            *o = amp * (dot(self.frequency(j), x) + b).cos();
        }
    }

    /// Map one vector.
    pub fn map(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        let mut out = vec![0.0; self.n_components];
        self.transform_row(x, &mut out);
        Ok(out)
    }
}

/// Row-major `n x D` random-feature matrix of a row-major `n x p` input.
pub fn rff_transform(params: &RffParams, samples: &[f64], p: usize) -> Result<Vec<f64>> {
    if p != params.n_features || samples.len() % p != 0 {
        return Err(Error::DimensionMismatch {
            expected: params.n_features,
            found: p,
        });
    }
    let d = params.n_components;
    let mut out = vec![0.0; samples.len() / p * d];
    for (x, row) in samples.chunks_exact(p).zip(out.chunks_exact_mut(d)) {
        params.transform_row(x, row);
    }
    Ok(out)
}

pub fn rff_transform_dataset(params: &RffParams, data: &Dataset) -> Result<Dataset> {
    let z = rff_transform(params, data.samples(), data.n_features())?;
    let names = (0..params.n_components)
        .map(|j| format!("rff{j}"))
        .collect();
    data.with_samples(z, params.n_components)?
        .with_feature_names(names)
}

pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::InvalidGamma(gamma));
    }
    let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-gamma * sq).exp())
}
