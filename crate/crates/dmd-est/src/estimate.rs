use inertia_core::{
    AreaDataset, AreaEstimate, AreaResult, DmdAnchor, DmdConfig, EventTiming, InertiaEstimate,
    Method,
};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{DmdError, Result};
use crate::model::{build_snapshots, fit, DmdModel};

/// Upper bound on the area damping estimate (system base).
pub const MAX_DAMPING: f64 = 1.0;

/// Per-area solution of the 2x2 real/imaginary system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaSolution {
    pub h: f64,
    pub d: f64,
    pub unconstrained_h: f64,
    pub unconstrained_d: f64,
    /// Bound `D` was clamped to, if the unconstrained value left `[0, 1]`.
    pub clamped_to: Option<f64>,
    /// 2-norm condition number of the 2x2 matrix.
    pub cond: f64,
}

fn cond2(a: [[f64; 2]; 2]) -> f64 {
    // singular values of a 2x2 from its Gram matrix
    let f = a[0][0].powi(2) + a[0][1].powi(2) + a[1][0].powi(2) + a[1][1].powi(2);
    let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs();
    let disc = (f * f - 4.0 * det * det).max(0.0).sqrt();
    let smax = ((f + disc) / 2.0).sqrt();
    let smin = ((f - disc) / 2.0).max(0.0).sqrt();
    if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    }
}

/// Solves area `area` of a model with amplitudes.
///
/// The modal sums run over the modes with non-negative imaginary discrete
/// eigenvalue: summing both members of a conjugate pair would cancel the
/// imaginary row. Each mode of a signal obeying the incremental swing
/// equation satisfies `(2H lambda + D) phi_w + phi_P = 0`, so the reduced
/// sums keep the balance exact.
pub fn solve_area(model: &DmdModel, area: usize) -> std::result::Result<AreaSolution, String> {
    let b = model.amplitudes.as_ref().ok_or("amplitudes have not been computed")?;
    let n_areas = model.modes.nrows() / 2;
    if area >= n_areas {
        return Err(format!("area index {area} out of range"));
    }
    let zero = Complex64::new(0.0, 0.0);
    let (mut swl, mut sw, mut sp) = (zero, zero, zero);
    for k in 0..model.n_modes() {
        if model.discrete[k].im < 0.0 {
            continue;
        }
        let wb = model.modes[(area, k)] * b[k];
        swl += wb * model.eigenvalues[k];
        sw += wb;
        sp += model.modes[(n_areas + area, k)] * b[k];
    }
    let a = [[swl.re, sw.re], [swl.im, sw.im]];
    let r = [-sp.re, -sp.im];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = a[0][0].powi(2) + a[0][1].powi(2) + a[1][0].powi(2) + a[1][1].powi(2);
    if !(det.abs() > 1e-12 * scale) || !det.is_finite() {
        return Err("singular 2x2 system: no electromechanical content in area signals".into());
    }
    let two_h = (r[0] * a[1][1] - a[0][1] * r[1]) / det;
    let d = (a[0][0] * r[1] - a[1][0] * r[0]) / det;
    let cond = cond2(a);
    let (two_h_c, d_c, clamped_to) = if (0.0..=MAX_DAMPING).contains(&d) {
        (two_h, d, None)
    } else {
        let bound = d.clamp(0.0, MAX_DAMPING);
        let rr = [r[0] - a[0][1] * bound, r[1] - a[1][1] * bound];
        let col = [a[0][0], a[1][0]];
        let nn = col[0] * col[0] + col[1] * col[1];
        ((col[0] * rr[0] + col[1] * rr[1]) / nn, bound, Some(bound))
    };
    let h = two_h_c / 2.0;
    if !(h.is_finite() && h > 0.0) {
        return Err(format!("non-positive inertia after constraint handling (H = {h:.6e})"));
    }
    Ok(AreaSolution {
        h,
        d: d_c,
        unconstrained_h: two_h / 2.0,
        unconstrained_d: d,
        clamped_to,
        cond,
    })
}

/// Sample index the start index counts from.
pub fn anchor_index(dataset: &AreaDataset, cfg: &DmdConfig, timing: &EventTiming) -> usize {
    let t = match cfg.anchor {
        DmdAnchor::Clear => timing.t_clear,
        DmdAnchor::Inception => timing.t_start,
    };
    dataset.index_at(t)
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn fit_window(dataset: &AreaDataset, cfg: &DmdConfig, timing: &EventTiming) -> Result<(DmdModel, usize)> {
    let anchor = anchor_index(dataset, cfg, timing);
    let x = build_snapshots(dataset);
    let len = x.ncols().saturating_sub(anchor);
    if cfg.start_index >= len {
        return Err(DmdError::StartIndex { index: cfg.start_index, len });
    }
    let window = x.columns(anchor, len).into_owned();
    let mut model = fit(&window, dataset.dt(), cfg.rank)?;
    model.compute_amplitudes(&window, cfg.start_index)?;
    Ok((model, anchor))
}

/// DMD estimate per area. The model is fitted on the record from the anchor
/// (fault clearing by default) onwards and amplitudes are taken
/// `start_index` samples after the anchor.
pub fn estimate(dataset: &AreaDataset, cfg: &DmdConfig, timing: &EventTiming) -> InertiaEstimate {
    let mut hyper = json!({
        "rank": cfg.rank,
        "start_index": cfg.start_index,
        "anchor": match cfg.anchor { DmdAnchor::Clear => "clear", DmdAnchor::Inception => "inception" },
    });
    let (model, anchor) = match fit_window(dataset, cfg, timing) {
        Ok(v) => v,
        Err(e) => {
            let reason = e.to_string();
            return InertiaEstimate {
                method: Method::Dmd,
                areas: dataset
                    .area_ids()
                    .iter()
                    .map(|a| AreaEstimate {
                        area: a.clone(),
                        result: AreaResult::failed(reason.clone()),
                        diagnostics: Value::Null,
                    })
                    .collect(),
                diagnostics: hyper,
            };
        }
    };
    hyper["anchor_sample"] = json!(anchor);
    hyper["start_sample"] = json!(anchor + cfg.start_index);
    hyper["rank_used"] = json!(model.rank);
    hyper["continuous_eigenvalues"] = json!(pairs(&model.eigenvalues));
    hyper["singular_values"] = json!(model.singular_values);
    hyper["amplitude_residual"] = json!(model.amplitude_residual);
    hyper["amplitude_cond"] = json!(model.amplitude_cond);
    hyper["warnings"] = json!(model.warnings);

    let areas = dataset
        .area_ids()
        .iter()
        .enumerate()
        .map(|(i, area)| match solve_area(&model, i) {
            Ok(sol) => AreaEstimate {
                area: area.clone(),
                result: AreaResult::from_h(sol.h, Some(sol.d)),
                diagnostics: json!({
                    "unconstrained_h": sol.unconstrained_h,
                    "unconstrained_d": sol.unconstrained_d,
                    "clamped_to": sol.clamped_to,
                    "cond": sol.cond,
                }),
            },
            Err(reason) => AreaEstimate {
                area: area.clone(),
                result: AreaResult::failed(reason),
                diagnostics: Value::Null,
            },
        })
        .collect();
    InertiaEstimate {
        method: Method::Dmd,
        areas,
        diagnostics: hyper,
    }
}
