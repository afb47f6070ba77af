//! Shared fixtures for the criterion benches.

use bcp_core::{bcp_train, gen_linear, BcpConfig, Dataset, Hyperplane, Label, LinearGenSpec};

/// Linearly separable data with a small margin; deterministic per seed.
pub fn linear_data(n: usize, p: usize, seed: u64) -> Dataset {
    gen_linear(&LinearGenSpec {
        n,
        p,
        seed,
        margin_gap: 0.05,
    })
    .expect("valid generator spec")
    .dataset
}

/// BCP hyperplane using the pipeline's default budget.
pub fn bcp_hyperplane(d: &Dataset) -> Hyperplane {
    let cfg = BcpConfig {
        max_iters: 10,
        ..Default::default()
    };
    bcp_train(d, &cfg).expect("two-class data").best_hyperplane
}

/// Labels plus scores with ties, for AUC timing.
pub fn scored_labels(n: usize) -> (Vec<Label>, Vec<f64>) {
    let labels = (0..n).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
    let scores = (0..n).map(|i| ((i * 7919) % 1000) as f64 / 100.0).collect();
    (labels, scores)
}
