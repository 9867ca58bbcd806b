//! Declarative scenario files (`schema_version: 1`).
//!
//! A scenario file is a single JSON object carrying the grid model at the top
//! level (`buses`, `generators`, `lines`, `loads`, `areas`,
//! `system_base_mva`, `nominal_frequency_hz`) plus the optional scenario keys
//! `disturbance`, `simulation`, `noise`, `filter` and `estimators`. A bare
//! grid model file is simply a scenario file without those keys.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::grid::GridModel;

pub const SCHEMA_VERSION: u32 = 1;

/// Minimum steady-state window ahead of the disturbance, seconds.
pub const MIN_PRE_DISTURBANCE_S: f64 = 1.0;
/// Minimum record length after the disturbance is cleared, seconds.
pub const MIN_POST_CLEAR_S: f64 = 1.0;
/// Default three-phase fault shunt admittance, pu.
pub const DEFAULT_FAULT_ADMITTANCE: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceKind {
    LoadStep,
    BusFault,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceSpec {
    pub kind: DisturbanceKind,
    pub bus: u32,
    /// Load change in pu (LoadStep) or fault shunt admittance in pu (BusFault).
    #[serde(default = "default_magnitude")]
    pub magnitude: f64,
    pub t_start_s: f64,
    #[serde(default)]
    pub t_clear_s: Option<f64>,
}

fn default_magnitude() -> f64 {
    DEFAULT_FAULT_ADMITTANCE
}

impl DisturbanceSpec {
    pub fn load_step(bus: u32, delta_p: f64, t_start_s: f64) -> Self {
        Self {
            kind: DisturbanceKind::LoadStep,
            bus,
            magnitude: delta_p,
            t_start_s,
            t_clear_s: None,
        }
    }

    pub fn bus_fault(bus: u32, t_start_s: f64, t_clear_s: f64) -> Self {
        Self {
            kind: DisturbanceKind::BusFault,
            bus,
            magnitude: DEFAULT_FAULT_ADMITTANCE,
            t_start_s,
            t_clear_s: Some(t_clear_s),
        }
    }

    /// Time after which the network topology no longer changes.
    pub fn settled_time(&self) -> f64 {
        match self.kind {
            DisturbanceKind::LoadStep => self.t_start_s,
            DisturbanceKind::BusFault => self.t_clear_s.unwrap_or(self.t_start_s),
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.magnitude != 0.0 && self.magnitude.is_finite()) {
            return Err(CoreError::InvalidScenario(
                "disturbance magnitude must be finite and non-zero".into(),
            ));
        }
        if !(self.t_start_s >= MIN_PRE_DISTURBANCE_S) {
            return Err(CoreError::InvalidScenario(format!(
                "disturbance must start at or after {MIN_PRE_DISTURBANCE_S} s to leave a steady-state window"
            )));
        }
        match (self.kind, self.t_clear_s) {
            (DisturbanceKind::BusFault, Some(tc)) if tc > self.t_start_s => {}
            (DisturbanceKind::BusFault, Some(_)) => {
                return Err(CoreError::InvalidScenario(
                    "t_clear_s must be later than t_start_s".into(),
                ))
            }
            (DisturbanceKind::BusFault, None) => {
                return Err(CoreError::InvalidScenario("bus fault needs t_clear_s".into()))
            }
            (DisturbanceKind::LoadStep, _) => {}
        }
        if self.kind == DisturbanceKind::BusFault && self.magnitude < 0.0 {
            return Err(CoreError::InvalidScenario(
                "fault shunt admittance must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSettings {
    #[serde(default = "default_duration")]
    pub duration_s: f64,
    #[serde(default = "default_rate")]
    pub measurement_rate_hz: f64,
}

fn default_duration() -> f64 {
    10.0
}

fn default_rate() -> f64 {
    60.0
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            duration_s: default_duration(),
            measurement_rate_hz: default_rate(),
        }
    }
}

/// Unit `sigma` is quoted in for the speed channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedNoiseUnits {
    /// Hz of frequency deviation; the pu speed trace gets `sigma / f_nom`.
    #[default]
    Hz,
    /// Per-unit speed deviation.
    Pu,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
    /// Power channels always take `sigma` in pu on the system base.
    #[serde(default)]
    pub speed_units: SpeedNoiseUnits,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Self {
        Self { sigma, seed, speed_units: SpeedNoiseUnits::default() }
    }

    /// Standard deviation applied to a pu speed trace.
    pub fn speed_sigma_pu(&self, nominal_frequency_hz: f64) -> f64 {
        match self.speed_units {
            SpeedNoiseUnits::Hz => self.sigma / nominal_frequency_hz,
            SpeedNoiseUnits::Pu => self.sigma,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.sigma >= 0.0 && self.sigma.is_finite() {
            Ok(())
        } else {
            Err(CoreError::InvalidScenario(format!(
                "noise sigma must be >= 0, got {}",
                self.sigma
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub cutoff_hz: f64,
    #[serde(default = "default_filter_order")]
    pub order: usize,
}

fn default_filter_order() -> usize {
    2
}

impl FilterSpec {
    /// `dt` is the sample interval of the trace the filter will be applied to.
    pub fn check(&self, dt: f64) -> Result<()> {
        let nyquist = 0.5 / dt;
        if self.order == 0 {
            return Err(CoreError::InvalidScenario("filter order must be >= 1".into()));
        }
        if !(self.cutoff_hz > 0.0 && self.cutoff_hz < nyquist) {
            return Err(CoreError::InvalidScenario(format!(
                "filter cutoff {} Hz must lie in (0, {nyquist}) Hz",
                self.cutoff_hz
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SysIdConfig {
    pub enabled: bool,
    /// State dimension n of the identified model.
    pub order: usize,
    /// Polynomial order N_p of the step-response fit.
    pub poly_order: usize,
    /// Step-response fit window, seconds.
    pub fit_window_s: f64,
    /// Keep the pre-disturbance samples in the identification data.
    pub include_prefault: bool,
    /// Identify a direct feedthrough term; off keeps the model strictly proper.
    pub feedthrough: bool,
    /// Relative singular-value cutoff of the projection regression.
    pub projection_rcond: f64,
}

impl Default for SysIdConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            order: 2,
            poly_order: 4,
            fit_window_s: 0.5,
            include_prefault: true,
            feedthrough: false,
            projection_rcond: 1e-3,
        }
    }
}

/// Reference event for the DMD start index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DmdAnchor {
    /// Count samples from the fault-clearing time (or the step time).
    Clear,
    /// Count samples from the disturbance inception.
    Inception,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DmdConfig {
    pub enabled: bool,
    /// Truncation rank; `None` keeps the full rank 2*N_a.
    pub rank: Option<usize>,
    /// Samples after the anchor at which the amplitudes are computed.
    pub start_index: usize,
    pub anchor: DmdAnchor,
}

impl Default for DmdConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            rank: None,
            start_index: 14,
            anchor: DmdAnchor::Clear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OscConfig {
    pub enabled: bool,
    /// Upper edge B of the summed band, Hz.
    pub bandwidth_hz: f64,
    pub include_dc: bool,
}

impl Default for OscConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            bandwidth_hz: 2.0,
            include_dc: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorsConfig {
    pub sysid: SysIdConfig,
    pub dmd: DmdConfig,
    pub osc: OscConfig,
}

impl EstimatorsConfig {
    pub fn any_enabled(&self) -> bool {
        self.sysid.enabled || self.dmd.enabled || self.osc.enabled
    }
}

/// On-disk scenario description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub grid: GridModel,
    #[serde(default)]
    pub disturbance: Option<DisturbanceSpec>,
    #[serde(default)]
    pub simulation: SimulationSettings,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub filter: Option<FilterSpec>,
    #[serde(default)]
    pub estimators: EstimatorsConfig,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CoreError::SchemaVersion {
                found: file.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        Ok(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn scenario_id(&self) -> String {
        self.name.clone().unwrap_or_else(|| "scenario".to_string())
    }

    /// Checks everything needed to run the scenario end to end.
    pub fn check_runnable(&self) -> Result<&DisturbanceSpec> {
        self.grid.check()?;
        let d = self
            .disturbance
            .as_ref()
            .ok_or_else(|| CoreError::InvalidScenario("missing `disturbance`".into()))?;
        d.check()?;
        let sim = &self.simulation;
        if !(sim.measurement_rate_hz > 0.0) {
            return Err(CoreError::InvalidScenario("measurement_rate_hz must be positive".into()));
        }
        if !(sim.duration_s >= d.settled_time() + MIN_POST_CLEAR_S) {
            return Err(CoreError::InvalidScenario(format!(
                "duration {} s must extend at least {MIN_POST_CLEAR_S} s past {} s",
                sim.duration_s,
                d.settled_time()
            )));
        }
        if let Some(n) = &self.noise {
            n.check()?;
        }
        if let Some(f) = &self.filter {
            f.check(1.0 / sim.measurement_rate_hz)?;
        }
        if !self.estimators.any_enabled() {
            return Err(CoreError::InvalidScenario("no estimator enabled".into()));
        }
        Ok(d)
    }
}
