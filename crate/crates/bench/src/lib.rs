//! Scenario runner and scoring for the area inertia estimators.
//!
//! A scenario is simulated once, passed through the measurement channel
//! (noise, low-pass filter), handed to every enabled estimator and scored
//! against the simulator's own ground truth. Sweeps re-run one estimator
//! over a hyperparameter on the same data; the time-varying study repeats
//! the whole pipeline per operating hour.

mod error;
mod metrics;
pub mod report;
mod scenario;
mod sweep;
mod timevary;

pub use error::{BenchError, Result};
pub use metrics::error_metrics;
pub use scenario::{
    all_failed, enabled_methods, estimate_all, ground_truth, prepare, run_method, run_scenario,
    Prepared, ScenarioOutcome,
};
pub use sweep::{sweep, SweepParam, SweepResult, SweepRow};
pub use timevary::{apply_hour, timevarying_study, HourOutcome, HourSpec, LoadProfile};
