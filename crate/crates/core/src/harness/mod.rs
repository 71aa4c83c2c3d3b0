//! Seeded multi-trial experiments, their summaries, and the acceptance checks
//! behind `knapsack-moea verify`.

mod experiment;
pub mod verify;

pub use experiment::{
    default_escape_threshold, reference_thresholds, resolve_instance, run_experiment, run_trial,
    summarize_csv_dir, write_summary, ExperimentConfig, ExperimentSummary, InitMethod,
    InstanceSource, RatioStats, TrialSetup,
};
