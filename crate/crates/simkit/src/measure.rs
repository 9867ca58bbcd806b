//! Area centre-of-inertia signals and the estimator dataset.

use inertia_core::{AreaDataset, GridModel, SignalTrace};

use crate::error::{Result, SimError};
use crate::sim::SimulationResult;

fn check_consistent(result: &SimulationResult, model: &GridModel) -> Result<()> {
    let ids: Vec<&str> = model.generators.iter().map(|g| g.id.as_str()).collect();
    let res_ids: Vec<&str> = result.gen_ids.iter().map(String::as_str).collect();
    if ids != res_ids {
        return Err(SimError::Invalid(
            "simulation result was produced from a different generator set".into(),
        ));
    }
    Ok(())
}

/// Rating-weighted centre-of-inertia speed deviation per area, in
/// `model.area_ids()` order. Areas without generators yield `None`.
pub fn compute_area_coi(
    result: &SimulationResult,
    model: &GridModel,
) -> Result<Vec<(String, Option<SignalTrace>)>> {
    check_consistent(result, model)?;
    model
        .generators_by_area()
        .into_iter()
        .map(|(area, idx)| {
            if idx.is_empty() {
                return Ok((area, None));
            }
            let total: f64 = idx.iter().map(|&g| model.generators[g].rating_mva).sum();
            let values = (0..result.len())
                .map(|k| {
                    idx.iter()
                        .map(|&g| model.generators[g].rating_mva * result.domega[g][k])
                        .sum::<f64>()
                        / total
                })
                .collect();
            let trace = SignalTrace::new(values, result.dt, result.time[0])?;
            Ok((area, Some(trace)))
        })
        .collect()
}

/// Per-area deviations from the pre-disturbance mean.
///
/// `power_dev[i]` is the change in electrical power drawn from area `i`'s
/// machines (system base), so the incremental swing equation reads
/// `2 H_i d(dw_i)/dt = -dP_i - D_i dw_i` with a leading minus. Areas without
/// generators are left out.
pub fn extract_area_dataset(result: &SimulationResult, model: &GridModel) -> Result<AreaDataset> {
    let coi = compute_area_coi(result, model)?;
    let pre_samples = result
        .time
        .iter()
        .take_while(|&&t| t < result.t_disturbance - 1e-9)
        .count();
    let pre_window = pre_samples as f64 * result.dt;
    if pre_samples == 0 || pre_window < 1.0 - 1e-9 {
        return Err(SimError::MissingSteadyWindow(format!(
            "only {pre_window:.3} s of pre-disturbance data (need 1 s)"
        )));
    }
    let deviation = |v: &[f64]| -> Vec<f64> {
        let mean = v[..pre_samples].iter().sum::<f64>() / pre_samples as f64;
        v.iter().map(|x| x - mean).collect()
    };

    let mut ids = Vec::new();
    let mut speed = Vec::new();
    let mut power = Vec::new();
    for (a, (area, trace)) in coi.into_iter().enumerate() {
        let Some(trace) = trace else { continue };
        debug_assert_eq!(result.area_ids[a], area);
        speed.push(trace.with_values(deviation(trace.values()))?);
        power.push(trace.with_values(deviation(&result.area_pe[a]))?);
        ids.push(area);
    }
    Ok(AreaDataset::new(ids, speed, power)?)
}
