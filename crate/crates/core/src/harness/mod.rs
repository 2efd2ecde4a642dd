//! Seeded Monte-Carlo experiments over scenarios and algorithms.
//!
//! Every trial owns its random streams, derived from the master seed and the
//! trial's (scenario, algorithm, index) coordinates. Trials run in parallel
//! and are collected in coordinate order, so outputs do not depend on the
//! number of workers.

mod experiment;
mod output;
mod seed;
mod trial;
mod verify;

pub use experiment::{
    geometric_checkpoints, median, run_anytime_experiment, run_stopping_time_experiment, summarize, AnytimeReport,
    CellParams, CellSummary, ErrorCurve, ExperimentConfig, ResolvedScenario, StoppingReport, CHECKPOINT_RATIO,
    DEFAULT_ANYTIME_TRIALS, DEFAULT_MAX_PULLS, DEFAULT_NU, DEFAULT_STOPPING_TRIALS,
};
pub use output::{
    anytime_rows, write_anytime, write_stop_times, write_summary, write_trials, AnytimeRow, Format, StopTimeRow,
    ANYTIME_HEADER, STOP_TIMES_HEADER, SUMMARY_HEADER, TRIAL_HEADER,
};
pub use seed::derive_trial_seed;
pub use trial::{run_trial, validate_checkpoints, TrialResult};
pub use verify::{verify_lil_bound, LilVerification};
