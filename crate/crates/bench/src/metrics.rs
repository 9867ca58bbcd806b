use std::collections::BTreeMap;

use inertia_core::{AreaError, EstimationReport, InertiaEstimate};

use crate::error::{BenchError, Result};

/// `EE_i = |H_est - H_true| / H_true * 100` per area and `MEE = max EE`.
///
/// Areas whose estimate failed are kept with `ee_pct = None`, excluded from
/// the MEE, and mark the report incomplete. Areas without ground truth are
/// dropped.
pub fn error_metrics(
    scenario: &str,
    truth: &BTreeMap<String, f64>,
    est: &InertiaEstimate,
) -> Result<EstimationReport> {
    let areas: Vec<AreaError> = est
        .areas
        .iter()
        .filter_map(|a| {
            let h_true = *truth.get(&a.area)?;
            let ee_pct = a.result.h().map(|h| (h - h_true).abs() / h_true * 100.0);
            Some(AreaError { area: a.area.clone(), h_true, result: a.result.clone(), ee_pct })
        })
        .collect();
    if areas.is_empty() {
        return Err(BenchError::NoCommonAreas);
    }
    let complete = areas.iter().all(|a| a.ee_pct.is_some());
    let mee_pct = areas.iter().filter_map(|a| a.ee_pct).reduce(f64::max);
    Ok(EstimationReport {
        scenario: scenario.to_string(),
        method: est.method,
        areas,
        mee_pct,
        complete,
        hyperparameters: est.diagnostics.clone(),
    })
}

#[cfg(test)]
mod tests {
    use inertia_core::{AreaEstimate, AreaResult, Method};
    use serde_json::Value;

    use super::*;

    fn est(values: &[(&str, Option<f64>)]) -> InertiaEstimate {
        InertiaEstimate {
            method: Method::SysId,
            areas: values
                .iter()
                .map(|&(a, h)| AreaEstimate {
                    area: a.into(),
                    result: h.map_or_else(|| AreaResult::failed("x"), |h| AreaResult::from_h(h, None)),
                    diagnostics: Value::Null,
                })
                .collect(),
            diagnostics: Value::Null,
        }
    }

    fn truth(values: &[(&str, f64)]) -> BTreeMap<String, f64> {
        values.iter().map(|&(a, h)| (a.to_string(), h)).collect()
    }

    #[test]
    fn exact_estimate_has_zero_error() {
        let r = error_metrics("s", &truth(&[("A", 5.0), ("B", 3.0)]), &est(&[("A", Some(5.0)), ("B", Some(3.0))])).unwrap();
        assert_eq!(r.mee_pct, Some(0.0));
        assert!(r.complete);
    }

    #[test]
    fn ten_percent_low() {
        let r = error_metrics("s", &truth(&[("A", 5.0)]), &est(&[("A", Some(4.5))])).unwrap();
        assert!((r.ee("A").unwrap() - 10.0).abs() < 1e-12);
        assert!((r.mee_pct.unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn mee_is_the_largest_area_error() {
        let r = error_metrics(
            "s",
            &truth(&[("A", 100.0), ("B", 100.0), ("C", 100.0)]),
            &est(&[("A", Some(102.0)), ("B", Some(93.0)), ("C", Some(104.0))]),
        )
        .unwrap();
        assert!((r.mee_pct.unwrap() - 7.0).abs() < 1e-9);
    }

    #[test]
    fn failures_are_excluded_and_flagged() {
        let r = error_metrics("s", &truth(&[("A", 5.0), ("B", 5.0)]), &est(&[("A", Some(5.5)), ("B", None)])).unwrap();
        assert!(!r.complete);
        assert!((r.mee_pct.unwrap() - 10.0).abs() < 1e-9);
        assert!(r.mee_or_inf().is_infinite());
    }

    #[test]
    fn disjoint_areas_are_an_error() {
        assert!(matches!(
            error_metrics("s", &truth(&[("A", 5.0)]), &est(&[("Z", Some(5.0))])),
            Err(BenchError::NoCommonAreas)
        ));
    }
}
