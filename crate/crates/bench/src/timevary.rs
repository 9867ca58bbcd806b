use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use inertia_core::{EstimationReport, ScenarioFile};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::scenario::run_scenario;

/// One operating hour: load multiplier and, per listed area, the generators
/// that are online. Areas not listed keep all their generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourSpec {
    pub hour: u32,
    #[serde(default = "unit_scale")]
    pub load_scale: f64,
    #[serde(default)]
    pub committed: BTreeMap<String, Vec<String>>,
}

fn unit_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    pub hours: Vec<HourSpec>,
}

impl LoadProfile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let profile: LoadProfile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if profile.hours.is_empty() {
            return Err(BenchError::Config("profile has no hours".into()));
        }
        Ok(profile)
    }

    /// A daily profile: loads follow `1 + amplitude * sin(2 pi (h - 6) / 24)`
    /// and, in hours where the scale drops below `decommit_below`, the
    /// listed generators go offline.
    pub fn synthetic_daily(amplitude: f64, decommit_below: f64, offline: &[(&str, &str)]) -> Self {
        let hours = (0..24)
            .map(|h| {
                let scale = 1.0 + amplitude * (2.0 * std::f64::consts::PI * (h as f64 - 6.0) / 24.0).sin();
                let mut committed = BTreeMap::new();
                if scale < decommit_below {
                    for &(area, gen) in offline {
                        committed.insert(area.to_string(), vec![gen.to_string()]);
                    }
                }
                HourSpec { hour: h, load_scale: scale, committed }
            })
            .collect();
        Self { hours }
    }
}

/// Scenario for one hour: loads scaled, decommitted machines removed, and
/// the committed machines' dispatch rescaled in proportion so that
/// generation matches the scaled load.
pub fn apply_hour(base: &ScenarioFile, hour: &HourSpec) -> Result<ScenarioFile> {
    if !(hour.load_scale > 0.0 && hour.load_scale.is_finite()) {
        return Err(BenchError::Config(format!("hour {}: load scale must be positive", hour.hour)));
    }
    let mut file = base.clone();
    let grid = &mut file.grid;
    for (area, ids) in &hour.committed {
        let members: BTreeSet<&str> = grid
            .generators
            .iter()
            .filter(|g| grid.areas.get(&g.bus) == Some(area))
            .map(|g| g.id.as_str())
            .collect();
        if members.is_empty() {
            return Err(BenchError::Config(format!("hour {}: area `{area}` has no generators", hour.hour)));
        }
        if let Some(bad) = ids.iter().find(|id| !members.contains(id.as_str())) {
            return Err(BenchError::Config(format!("hour {}: `{bad}` is not a generator of area `{area}`", hour.hour)));
        }
    }
    let areas = grid.areas.clone();
    grid.generators.retain(|g| {
        let area = &areas[&g.bus];
        hour.committed.get(area).map_or(true, |ids| ids.contains(&g.id))
    });
    if grid.generators.is_empty() {
        return Err(BenchError::Config(format!("hour {}: no generator committed", hour.hour)));
    }
    for l in &mut grid.loads {
        l.p_pu *= hour.load_scale;
    }
    let load: f64 = grid.loads.iter().map(|l| l.p_pu).sum();
    let gen: f64 = grid.generators.iter().map(|g| g.p_pu).sum();
    if gen > 0.0 {
        for g in &mut grid.generators {
            g.p_pu *= load / gen;
        }
    }
    file.name = Some(format!("{}_h{:02}", base.scenario_id(), hour.hour));
    Ok(file)
}

#[derive(Debug, Clone)]
pub struct HourOutcome {
    pub hour: u32,
    pub load_scale: f64,
    /// Reports, or why the hour was skipped.
    pub result: std::result::Result<Vec<EstimationReport>, String>,
}

/// Runs every hour of `profile` on top of `base`. Infeasible hours are
/// skipped and recorded.
pub fn timevarying_study(base: &ScenarioFile, profile: &LoadProfile) -> Vec<HourOutcome> {
    profile
        .hours
        .par_iter()
        .map(|h| HourOutcome {
            hour: h.hour,
            load_scale: h.load_scale,
            result: apply_hour(base, h)
                .and_then(|f| run_scenario(&f))
                .map(|o| o.reports)
                .map_err(|e| e.to_string()),
        })
        .collect()
}
