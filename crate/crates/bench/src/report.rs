use std::fmt::Write as _;

use inertia_core::{AreaError, AreaResult, EstimationReport};
use serde_json::{json, Value};

use crate::sweep::SweepResult;
use crate::timevary::HourOutcome;

pub const REPORT_HEADER: &str = "scenario,method,area,H_true,H_est,D_est,EE_pct,status";

/// Comment line opening every CSV: ground truth is the simulator's own.
pub const TRUTH_NOTE: &str =
    "# H_true is the synthetic ground truth of this toolkit's simulator fixture (system MVA base), not a measured or published value";

/// Reasons go into a CSV cell: no separators or line breaks.
fn cell_reason(reason: &str) -> String {
    reason.replace([',', '\n', '\r'], ";")
}

fn area_cells(a: &AreaError) -> String {
    match &a.result {
        AreaResult::Ok { h, d } => format!(
            "{:.6},{:.6},{},{:.4},ok",
            a.h_true,
            h,
            d.map_or_else(|| "NA".to_string(), |d| format!("{d:.6}")),
            a.ee_pct.unwrap_or(f64::NAN),
        ),
        AreaResult::Failed { reason } => {
            let fail = format!("FAIL({})", cell_reason(reason));
            format!("{:.6},{fail},{fail},{fail},fail", a.h_true)
        }
    }
}

fn report_rows(out: &mut String, prefix: &str, r: &EstimationReport) {
    for a in &r.areas {
        let _ = writeln!(out, "{prefix}{},{},{},{}", r.scenario, r.method, a.area, area_cells(a));
    }
}

/// `scenario,method,area,H_true,H_est,D_est,EE_pct,status`, one row per area.
pub fn reports_csv(reports: &[EstimationReport]) -> String {
    let mut out = format!("{TRUTH_NOTE}\n{REPORT_HEADER}\n");
    for r in reports {
        report_rows(&mut out, "", r);
    }
    out
}

/// Report columns prefixed with `param,value`.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = format!("{TRUTH_NOTE}\nparam,value,{REPORT_HEADER}\n");
    for row in &result.rows {
        report_rows(&mut out, &format!("{},{},", result.param, row.value), &row.report);
    }
    out
}

/// Report columns prefixed with `hour,load_scale`; skipped hours get one
/// `SKIPPED(reason)` row.
pub fn timevary_csv(outcomes: &[HourOutcome]) -> String {
    let mut out = format!("{TRUTH_NOTE}\nhour,load_scale,{REPORT_HEADER}\n");
    for h in outcomes {
        let prefix = format!("{},{:.6},", h.hour, h.load_scale);
        match &h.result {
            Ok(reports) => {
                for r in reports {
                    report_rows(&mut out, &prefix, r);
                }
            }
            Err(reason) => {
                let _ = writeln!(out, "{prefix},,,,,,,SKIPPED({})", cell_reason(reason));
            }
        }
    }
    out
}

fn mee_value(r: &EstimationReport) -> Value {
    json!({ "method": r.method, "mee_pct": r.mee_pct, "complete": r.complete })
}

pub fn reports_json(reports: &[EstimationReport]) -> Value {
    json!({ "note": TRUTH_NOTE.trim_start_matches("# "), "reports": reports })
}

pub fn sweep_json(result: &SweepResult) -> Value {
    json!({
        "note": TRUTH_NOTE.trim_start_matches("# "),
        "param": result.param.name(),
        "rows": result.rows.iter().map(|r| json!({
            "value": r.value,
            "summary": mee_value(&r.report),
            "report": r.report,
        })).collect::<Vec<_>>(),
    })
}

pub fn timevary_json(outcomes: &[HourOutcome]) -> Value {
    json!({
        "note": TRUTH_NOTE.trim_start_matches("# "),
        "hours": outcomes.iter().map(|h| match &h.result {
            Ok(reports) => json!({ "hour": h.hour, "load_scale": h.load_scale, "reports": reports }),
            Err(reason) => json!({ "hour": h.hour, "load_scale": h.load_scale, "skipped": reason }),
        }).collect::<Vec<_>>(),
    })
}
