use inertia_core::{
    AreaDataset, AreaEstimate, AreaResult, EventTiming, InertiaEstimate, Method, SignalTrace,
    SysIdConfig,
};
use serde_json::{json, Value};

use crate::error::{Result, SysIdError};
use crate::n4sid::{eigen_list, identify_with, IdentifyOptions};
use crate::poly::fit_polynomial;
use crate::step::step_response;

/// Estimates one area from its power (input) and speed (output) deviations.
/// Returns the result with a diagnostics record.
pub fn estimate_area(
    power: &SignalTrace,
    speed: &SignalTrace,
    cfg: &SysIdConfig,
) -> Result<(AreaResult, Value)> {
    let model = identify_with(
        power,
        speed,
        cfg.order,
        &IdentifyOptions { feedthrough: cfg.feedthrough, projection_rcond: cfg.projection_rcond },
    )?;
    let g = step_response(&model, cfg.fit_window_s, model.dt)?;
    let fit = fit_polynomial(&g, cfg.poly_order, cfg.fit_window_s)?;
    let c1 = fit.slope();
    let diagnostics = json!({
        "order": model.order(),
        "singular_values": model.singular_values,
        "fit_pct": finite_or_null(model.fit_pct),
        "unstable": model.unstable,
        "discrete_eigenvalues": eigen_list(&model),
        "den": model.continuous.as_ref().map(|c| c.den.clone()),
        "num": model.continuous.as_ref().map(|c| c.num.clone()),
        "poly_coefficients": fit.coefficients,
        "poly_residual_rms": fit.residual_rms,
        "warnings": model.warnings,
    });
    let result = if c1.is_finite() && c1 < 0.0 {
        AreaResult::from_h(-1.0 / (2.0 * c1), None)
    } else {
        AreaResult::failed(format!("non-physical slope (c1 = {c1:.6e})"))
    };
    Ok((result, diagnostics))
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Per-area system-identification estimate. Failures are recorded per
/// area. With `include_prefault` off, identification starts at the
/// disturbance inception.
pub fn estimate(dataset: &AreaDataset, cfg: &SysIdConfig, timing: &EventTiming) -> InertiaEstimate {
    let start = if cfg.include_prefault {
        0
    } else {
        dataset.index_at(timing.t_start).min(dataset.len())
    };
    let areas = (0..dataset.n_areas())
        .map(|i| {
            let area = dataset.area_ids()[i].clone();
            let run = || -> Result<(AreaResult, Value)> {
                let p = dataset.power(i).slice(start, dataset.len()).map_err(SysIdError::from)?;
                let w = dataset.speed(i).slice(start, dataset.len()).map_err(SysIdError::from)?;
                estimate_area(&p, &w, cfg)
            };
            let (result, diagnostics) = match run() {
                Ok(r) => r,
                Err(e) => (AreaResult::failed(e.to_string()), Value::Null),
            };
            AreaEstimate { area, result, diagnostics }
        })
        .collect();
    InertiaEstimate {
        method: Method::SysId,
        areas,
        diagnostics: json!({
            "order": cfg.order,
            "poly_order": cfg.poly_order,
            "fit_window_s": cfg.fit_window_s,
            "include_prefault": cfg.include_prefault,
            "first_sample": start,
        }),
    }
}
