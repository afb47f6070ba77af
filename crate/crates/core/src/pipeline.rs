//! The three-step proposal: fit BCP on the training split, keep the rows
//! near its hyperplane, train the downstream classifier on those rows.
//! A baseline with the same trainer and seed on the full training split is
//! run alongside so the reduction is the only difference.

use serde::{Deserialize, Serialize};

use crate::bcp::{bcp_train, BcpConfig};
use crate::dataset::{split_dataset, Dataset, Split};
use crate::error::{Error, Result};
use crate::features::{rff_transform_dataset, RffSpec};
use crate::metrics::{evaluate, time_block, EvalReport};
use crate::reduce::{extract_subset, ReductionPolicy};
use crate::synth::poly_expand_dataset;
use crate::trainers::{model_decision, Model, TrainerConfig};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureStage {
    #[default]
    None,
    Rff(RffSpec),
    Poly {
        degree: usize,
    },
}

impl FeatureStage {
    pub fn apply(&self, d: &Dataset) -> Result<Option<Dataset>> {
        match self {
            Self::None => Ok(None),
            Self::Rff(spec) => rff_transform_dataset(&spec.fit(d.n_features())?, d).map(Some),
            Self::Poly { degree } => poly_expand_dataset(d, *degree).map(Some),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            test_fraction: 0.2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub bcp: BcpConfig,
    pub policy: ReductionPolicy,
    pub trainer: TrainerConfig,
    pub split: SplitConfig,
    pub feature_stage: FeatureStage,
}

/// BCP budget used by the pipeline. The first iterations carry nearly all
/// of the hyperplane's quality for the reduction step.
pub const PIPELINE_BCP_ITERS: usize = 10;

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            bcp: BcpConfig {
                max_iters: PIPELINE_BCP_ITERS,
                ..Default::default()
            },
            policy: ReductionPolicy::default(),
            trainer: TrainerConfig::default(),
            split: SplitConfig::default(),
            feature_stage: FeatureStage::None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.bcp.validate()?;
        self.policy.validate()?;
        self.trainer.validate()?;
        let f = self.split.test_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "split.test_fraction must be in (0, 1), got {f}"
            )));
        }
        Ok(())
    }

    /// Same configuration with the split and trainer seeded by `seed`.
    pub fn reseeded(&self, seed: u64) -> Self {
        let mut cfg = self.clone();
        cfg.split.seed = seed;
        cfg.trainer = cfg.trainer.with_seed(seed);
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PipelineTimings {
    pub bcp_s: f64,
    pub reduce_s: f64,
    pub train_reduced_s: f64,
    pub train_full_s: f64,
}

impl PipelineTimings {
    /// Wall time of the whole proposal.
    pub fn pipeline_total(&self) -> f64 {
        self.bcp_s + self.reduce_s + self.train_reduced_s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub metrics_pipeline: EvalReport,
    pub metrics_baseline: EvalReport,
    pub timings: PipelineTimings,
    pub subset_size: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub bcp_iterations: usize,
    pub bcp_training_errors: usize,
    pub config: PipelineConfig,
    #[serde(skip)]
    pub split: Split,
    /// Subset rows as indices into the input dataset.
    #[serde(skip)]
    pub subset_indices: Vec<usize>,
    #[serde(skip)]
    pub model_pipeline: Model,
    #[serde(skip)]
    pub model_baseline: Model,
}

pub fn run_pipeline(d: &Dataset, cfg: &PipelineConfig) -> Result<PipelineReport> {
    cfg.validate()?;
    let lifted = cfg.feature_stage.apply(d)?;
    let data = lifted.as_ref().unwrap_or(d);

    let split = split_dataset(data, cfg.split.test_fraction, cfg.split.seed)?;
    let train = split.train(data)?;
    let test = split.test(data)?;

    let (bcp, bcp_s) = time_block(|| bcp_train(&train, &cfg.bcp));
    let bcp = bcp?;
    let (subset, reduce_s) = time_block(|| -> Result<_> {
        let sel = extract_subset(&train, &bcp.best_hyperplane, &cfg.policy)?;
        let rows = train.select(&sel.indices)?;
        Ok((sel, rows))
    });
    let (selection, reduced) = subset?;
    if selection.n_positive == 0 || selection.n_negative == 0 {
        return Err(Error::SubsetSingleClass {
            positives: selection.n_positive,
            negatives: selection.n_negative,
        });
    }

    let (model_pipeline, train_reduced_s) = time_block(|| cfg.trainer.train(&reduced));
    let model_pipeline = model_pipeline?;
    let (model_baseline, train_full_s) = time_block(|| cfg.trainer.train(&train));
    let model_baseline = model_baseline?;

    let score = |m: &Model, wall: f64| -> Result<EvalReport> {
        evaluate(
            test.labels(),
            &model_decision(m, &test)?,
            m.threshold(),
            wall,
        )
    };
    let metrics_pipeline = score(&model_pipeline, bcp_s + reduce_s + train_reduced_s)?;
    let metrics_baseline = score(&model_baseline, train_full_s)?;

    let subset_indices = selection
        .indices
        .iter()
        .map(|&i| split.train_indices[i])
        .collect();
    Ok(PipelineReport {
        metrics_pipeline,
        metrics_baseline,
        timings: PipelineTimings {
            bcp_s,
            reduce_s,
            train_reduced_s,
            train_full_s,
        },
        subset_size: selection.indices.len(),
        n_train: train.n_samples(),
        n_test: test.n_samples(),
        bcp_iterations: bcp.iterations_run,
        bcp_training_errors: bcp.best_error_count,
        config: cfg.clone(),
        split,
        subset_indices,
        model_pipeline,
        model_baseline,
    })
}
