use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    SysId,
    Dmd,
    Osc,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::SysId, Method::Dmd, Method::Osc];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::SysId => "sysid",
            Method::Dmd => "dmd",
            Method::Osc => "osc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sysid" => Ok(Method::SysId),
            "dmd" => Ok(Method::Dmd),
            "osc" => Ok(Method::Osc),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// Disturbance timing handed to the estimators from scenario metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventTiming {
    /// Disturbance inception, s.
    pub t_start: f64,
    /// End of the last topology change (fault clearing), s. Equals
    /// `t_start` for load steps.
    pub t_clear: f64,
}

/// Outcome for one area. A valid estimate always has `h > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum AreaResult {
    Ok { h: f64, d: Option<f64> },
    Failed { reason: String },
}

impl AreaResult {
    /// Wraps a raw inertia value, turning non-positive or non-finite values
    /// into failures.
    pub fn from_h(h: f64, d: Option<f64>) -> Self {
        if h.is_finite() && h > 0.0 {
            AreaResult::Ok { h, d }
        } else {
            AreaResult::failed(format!("non-positive inertia estimate ({h:.6e})"))
        }
    }

    pub fn failed(reason: impl Into<String>) -> Self {
        AreaResult::Failed {
            reason: reason.into(),
        }
    }

    pub fn h(&self) -> Option<f64> {
        match self {
            AreaResult::Ok { h, .. } => Some(*h),
            AreaResult::Failed { .. } => None,
        }
    }

    pub fn d(&self) -> Option<f64> {
        match self {
            AreaResult::Ok { d, .. } => *d,
            AreaResult::Failed { .. } => None,
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, AreaResult::Ok { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    pub area: String,
    pub result: AreaResult,
    /// Method-specific record (fit residuals, condition numbers, ...).
    pub diagnostics: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InertiaEstimate {
    pub method: Method,
    pub areas: Vec<AreaEstimate>,
    /// Hyperparameters and method-wide diagnostics.
    pub diagnostics: Value,
}

impl InertiaEstimate {
    pub fn get(&self, area: &str) -> Option<&AreaEstimate> {
        self.areas.iter().find(|a| a.area == area)
    }

    pub fn h(&self, area: &str) -> Option<f64> {
        self.get(area).and_then(|a| a.result.h())
    }

    pub fn all_failed(&self) -> bool {
        self.areas.iter().all(|a| !a.result.is_ok())
    }
}

/// One row of an estimation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaError {
    pub area: String,
    pub h_true: f64,
    pub result: AreaResult,
    /// Percent; `None` when the estimate failed.
    pub ee_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub scenario: String,
    pub method: Method,
    pub areas: Vec<AreaError>,
    /// Max EE over areas with a valid estimate; `None` if every area failed.
    pub mee_pct: Option<f64>,
    /// False when at least one area failed.
    pub complete: bool,
    pub hyperparameters: Value,
}

impl EstimationReport {
    pub fn ee(&self, area: &str) -> Option<f64> {
        self.areas.iter().find(|a| a.area == area).and_then(|a| a.ee_pct)
    }

    /// MEE, treating an incomplete report as infinitely bad.
    pub fn mee_or_inf(&self) -> f64 {
        match (self.complete, self.mee_pct) {
            (true, Some(m)) => m,
            _ => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_positive_inertia_becomes_failure() {
        assert!(AreaResult::from_h(2.0, None).is_ok());
        assert!(!AreaResult::from_h(0.0, None).is_ok());
        assert!(!AreaResult::from_h(-1.0, Some(0.1)).is_ok());
        assert!(!AreaResult::from_h(f64::NAN, None).is_ok());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("foo".parse::<Method>().is_err());
    }
}
