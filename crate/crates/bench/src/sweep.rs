use std::fmt;
use std::str::FromStr;

use inertia_core::{EstimationReport, EstimatorsConfig, Method};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{BenchError, Result};
use crate::metrics::error_metrics;
use crate::scenario::{all_failed, run_method, Prepared};

/// Hyperparameters that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    /// `sysid.N_p`, polynomial order of the step-response fit.
    SysIdPolyOrder,
    /// `dmd.start_index`.
    DmdStartIndex,
    /// `osc.bandwidth_B`, Hz.
    OscBandwidth,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::SysIdPolyOrder => "sysid.N_p",
            SweepParam::DmdStartIndex => "dmd.start_index",
            SweepParam::OscBandwidth => "osc.bandwidth_B",
        }
    }

    pub fn method(self) -> Method {
        match self {
            SweepParam::SysIdPolyOrder => Method::SysId,
            SweepParam::DmdStartIndex => Method::Dmd,
            SweepParam::OscBandwidth => Method::Osc,
        }
    }

    /// Copy of `cfg` with the parameter set to `value`.
    pub fn apply(self, cfg: &EstimatorsConfig, value: f64) -> Result<EstimatorsConfig> {
        let mut cfg = cfg.clone();
        let count = || -> Result<usize> {
            if value >= 0.0 && value.fract() == 0.0 && value < 1e9 {
                Ok(value as usize)
            } else {
                Err(BenchError::Config(format!("{} takes non-negative integers, got {value}", self.name())))
            }
        };
        match self {
            SweepParam::SysIdPolyOrder => cfg.sysid.poly_order = count()?,
            SweepParam::DmdStartIndex => cfg.dmd.start_index = count()?,
            SweepParam::OscBandwidth => cfg.osc.bandwidth_hz = value,
        }
        Ok(cfg)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sysid.N_p" | "sysid.poly_order" => Ok(SweepParam::SysIdPolyOrder),
            "dmd.start_index" => Ok(SweepParam::DmdStartIndex),
            "osc.bandwidth_B" | "osc.bandwidth_hz" => Ok(SweepParam::OscBandwidth),
            other => Err(BenchError::Config(format!(
                "unknown sweep parameter `{other}` (expected sysid.N_p, dmd.start_index or osc.bandwidth_B)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub report: EstimationReport,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Per-value MEE, infinite where some area failed.
    pub fn mee(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.report.mee_or_inf()).collect()
    }
}

/// Re-runs the estimator owning `param` for every value on the same
/// prepared data. Estimator failures stay in the table.
pub fn sweep(prepared: &Prepared, cfg: &EstimatorsConfig, param: SweepParam, values: &[f64]) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(BenchError::Config("sweep needs at least one value".into()));
    }
    let method = param.method();
    let enabled = match method {
        Method::SysId => cfg.sysid.enabled,
        Method::Dmd => cfg.dmd.enabled,
        Method::Osc => cfg.osc.enabled,
    };
    if !enabled {
        return Err(BenchError::Config(format!("{param} belongs to the disabled {method} estimator")));
    }
    let configs = values.iter().map(|&v| param.apply(cfg, v)).collect::<Result<Vec<_>>>()?;
    let rows = values
        .par_iter()
        .zip(configs.par_iter())
        .map(|(&value, c)| {
            let est = run_method(method, &prepared.data, c, &prepared.timing)
                .unwrap_or_else(|e| all_failed(method, &prepared.data, &e.to_string()));
            let report = error_metrics(&prepared.scenario, &prepared.truth, &est)?;
            Ok(SweepRow { value, report })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { param, rows })
}
