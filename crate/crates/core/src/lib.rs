//! Training-set reduction with the Barycentric Correction Procedure.
//!
//! A cheap BCP hyperplane picks the training rows closest to the class
//! boundary; a linear SVM, MLP or perceptron is then trained on that subset
//! only. [`pipeline::run_pipeline`] runs the full proposal next to a
//! full-data baseline and [`grid::run_bench`] repeats it over a grid of
//! synthetic problems.

pub mod bcp;
pub mod dataset;
pub mod error;
pub mod features;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod reduce;
pub mod rng;
pub mod synth;
pub mod trainers;

pub use bcp::{bcp_train, BcpConfig, BcpResult, BcpWeights, IncrementMode};
pub use dataset::{
    split_dataset, ClassPartition, Dataset, Hyperplane, Label, Split, NEGATIVE, POSITIVE,
};
pub use error::{Error, Result};
pub use features::{rff_fit, rff_transform, RffParams, RffSpec};
pub use grid::{run_bench, BenchGrid, BenchReport, BenchRow};
pub use metrics::{accuracy, evaluate, roc_auc, time_block, EvalReport};
pub use pipeline::{run_pipeline, FeatureStage, PipelineConfig, PipelineReport};
pub use reduce::{extract_subset, Closeness, ReductionPolicy, SubsetSelection};
pub use rng::SeededRng;
pub use synth::{gen_linear, gen_poly, DataSpec, GenKind, LinearGenSpec, PolyGenSpec, SynthResult};
pub use trainers::{Model, TrainerConfig};
