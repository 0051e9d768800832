//! Scenario configuration, seeded Monte-Carlo runs of the four case studies
//! and result serialization.
//!
//! A study run is a pure function of its [`ScenarioConfig`]: every trial
//! draws from streams derived from the master seed and its own index, and
//! aggregation only sums integer counts or sorts samples, so the numeric
//! payload is identical for any worker count.

mod config;
mod emit;
mod montecarlo;
mod result;
mod studies;

pub use config::{
    DetectionConfig, LayoutConfig, MonteCarloConfig, ScenarioConfig, PRESETS, REFERENCE_FSPL_DB,
};
pub use emit::{emit, from_json, read_result, to_json, OutputFormat, RESULT_FILE};
pub use montecarlo::{monte_carlo, trial_seed, with_threads, MonteCarloRun};
pub use result::{
    iterations_to_reference, variant_name, within_two_stderr, ConditioningPayload,
    ConvergenceFailures, ConvergencePayload, ExperimentResult, HeatmapPayload,
    IterationsToReference, Payload, RobustnessPayload, Study, TrialFailure, SCHEMA_VERSION,
};
pub use studies::{
    draw_symbols, draw_unit_noise, run_case_study_1, run_case_study_2, run_case_study_3,
    run_case_study_4, run_study, CONVERGENCE_RESIDUAL,
};
