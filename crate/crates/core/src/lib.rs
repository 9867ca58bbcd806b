//! Shared domain types for data-driven area inertia estimation.
//!
//! Everything downstream (simulator, signal conditioning, the three
//! estimators and the benchmark runner) speaks in terms of the types
//! defined here: [`GridModel`] is the ground truth, [`AreaDataset`] is the
//! measurement input every estimator consumes, and [`InertiaEstimate`] /
//! [`EstimationReport`] carry results back out.
//!
//! All inertia constants are expressed in seconds on the common system MVA
//! base; power deviations are per-unit on the same base.

pub mod config;
pub mod error;
pub mod estimate;
pub mod fixtures;
pub mod grid;
pub mod linalg;
pub mod trace;

pub use config::{
    DisturbanceKind, DisturbanceSpec, DmdAnchor, DmdConfig, EstimatorsConfig, FilterSpec,
    NoiseSpec, OscConfig, ScenarioFile, SimulationSettings, SpeedNoiseUnits, SysIdConfig,
    SCHEMA_VERSION,
};
pub use error::{CoreError, Result};
pub use estimate::{
    AreaError, AreaEstimate, AreaResult, EstimationReport, EventTiming, InertiaEstimate, Method,
};
pub use grid::{
    true_area_inertia, validate, AreaInertia, Bus, Finding, Generator, GridModel, Line, Load,
    Severity,
};
pub use trace::{AreaDataset, SignalTrace};
