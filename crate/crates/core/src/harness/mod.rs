//! Evaluation: nested cross-validation, metrics, collocation statistics and
//! a synthetic corpus generator.

mod folds;
mod metrics;
mod pipeline;
mod stats;
mod synth;

use thiserror::Error;

use crate::features::FeatureError;
use crate::modelsearch::ModelError;

pub use folds::{plan_folds, FoldMode, FoldPlan};
pub use metrics::{metrics, Metrics};
pub use pipeline::{
    choose_model, decode, majority_baseline, nested_cv, pattern_index, render_grid, run_fold, train, BaselineReport,
    CVReport, FoldReport, PipelineConfig, TrainedPipeline,
};
pub use stats::{collocation_stats, CollocationStats, FeatureFiring};
pub use synth::{
    generate_synthetic, DiscourseSpec, FillerSpec, IndicatorSpec, SynthCorpus, SynthParams, TABLE1_DISTRIBUTION,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{predictions} predictions for {gold} gold labels")]
    LengthMismatch { predictions: usize, gold: usize },
    #[error("{units} splitting units cannot fill {folds} folds")]
    CorpusTooSmall { units: usize, folds: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("every sentence needs a gold class")]
    Unlabeled,
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParams(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
