use std::collections::BTreeMap;

use inertia_core::{
    true_area_inertia, AreaDataset, AreaEstimate, AreaResult, EstimationReport, EstimatorsConfig,
    EventTiming, InertiaEstimate, Method, ScenarioFile,
};
use inertia_simkit::{extract_area_dataset, simulate, SimulationResult};
use rayon::prelude::*;
use serde_json::Value;

use crate::error::{BenchError, Result};
use crate::metrics::error_metrics;

/// Simulated and conditioned data of one scenario, ready for the estimators.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: String,
    pub file: ScenarioFile,
    pub sim: SimulationResult,
    /// Dataset straight from the simulator.
    pub raw: AreaDataset,
    /// Dataset after noise and filtering (equal to `raw` when both are off).
    pub data: AreaDataset,
    pub timing: EventTiming,
    /// Area inertia on the system base, areas with generators only.
    pub truth: BTreeMap<String, f64>,
}

/// Area inertia ground truth on the system base.
pub fn ground_truth(file: &ScenarioFile) -> BTreeMap<String, f64> {
    true_area_inertia(&file.grid)
        .into_iter()
        .filter_map(|(a, v)| v.h_system.map(|h| (a, h)))
        .collect()
}

/// Simulates `file`, extracts the area dataset and applies the measurement
/// channel (noise, then filter).
pub fn prepare(file: &ScenarioFile) -> Result<Prepared> {
    let scenario = file.scenario_id();
    let dist = file.check_runnable()?;
    let sim = simulate(&file.grid, dist, &file.simulation)
        .map_err(|source| BenchError::Simulation { scenario: scenario.clone(), source })?;
    let raw = extract_area_dataset(&sim, &file.grid)
        .map_err(|source| BenchError::Simulation { scenario: scenario.clone(), source })?;
    let data = inertia_signal::condition(
        &raw,
        file.noise.as_ref(),
        file.filter.as_ref(),
        file.grid.nominal_frequency_hz,
    )?;
    let timing = EventTiming { t_start: sim.t_disturbance, t_clear: sim.t_clear };
    Ok(Prepared { scenario, truth: ground_truth(file), file: file.clone(), sim, raw, data, timing })
}

/// Estimate in which every area failed for the same reason.
pub fn all_failed(method: Method, data: &AreaDataset, reason: &str) -> InertiaEstimate {
    InertiaEstimate {
        method,
        areas: data
            .area_ids()
            .iter()
            .map(|a| AreaEstimate {
                area: a.clone(),
                result: AreaResult::failed(reason),
                diagnostics: Value::Null,
            })
            .collect(),
        diagnostics: Value::Null,
    }
}

/// Runs one estimator. Only configuration problems of the oscillation
/// estimator surface as errors; everything else is a per-area failure.
pub fn run_method(
    method: Method,
    data: &AreaDataset,
    cfg: &EstimatorsConfig,
    timing: &EventTiming,
) -> Result<InertiaEstimate> {
    Ok(match method {
        Method::SysId => inertia_sysid::estimate(data, &cfg.sysid, timing),
        Method::Dmd => inertia_dmd::estimate(data, &cfg.dmd, timing),
        Method::Osc => inertia_osc::estimate(data, &cfg.osc)?,
    })
}

pub fn enabled_methods(cfg: &EstimatorsConfig) -> Vec<Method> {
    Method::ALL
        .into_iter()
        .filter(|m| match m {
            Method::SysId => cfg.sysid.enabled,
            Method::Dmd => cfg.dmd.enabled,
            Method::Osc => cfg.osc.enabled,
        })
        .collect()
}

/// Reports of every enabled estimator, in `sysid, dmd, osc` order.
pub fn estimate_all(prepared: &Prepared, cfg: &EstimatorsConfig) -> Result<Vec<EstimationReport>> {
    enabled_methods(cfg)
        .into_par_iter()
        .map(|m| {
            let est = run_method(m, &prepared.data, cfg, &prepared.timing)?;
            error_metrics(&prepared.scenario, &prepared.truth, &est)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub prepared: Prepared,
    pub reports: Vec<EstimationReport>,
}

/// Simulate, condition, estimate, score.
pub fn run_scenario(file: &ScenarioFile) -> Result<ScenarioOutcome> {
    let prepared = prepare(file)?;
    let reports = estimate_all(&prepared, &file.estimators)?;
    Ok(ScenarioOutcome { prepared, reports })
}
