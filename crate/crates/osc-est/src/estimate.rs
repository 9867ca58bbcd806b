use std::f64::consts::PI;

use inertia_core::{AreaDataset, AreaEstimate, AreaResult, InertiaEstimate, Method, OscConfig, SignalTrace};
use inertia_signal::dft;
use num_complex::Complex64;
use serde_json::json;

use crate::error::{OscError, Result};

/// The band must hold at least this many bins.
pub const MIN_BINS_IN_BAND: usize = 5;

/// Relative size below which the eliminant is treated as zero.
const DENOM_RTOL: f64 = 1e-12;

/// Band sums of the speed spectrum `W`, its derivative `j 2 pi f W` and the
/// power spectrum `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSums {
    pub w: Complex64,
    pub dw: Complex64,
    pub p: Complex64,
    pub bins: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscSolution {
    pub h: f64,
    pub d: f64,
    pub sums: BandSums,
}

fn check_band(trace: &SignalTrace, cfg: &OscConfig) -> Result<()> {
    let b = cfg.bandwidth_hz;
    if !(b > 0.0 && b.is_finite()) {
        return Err(OscError::Bandwidth(b));
    }
    let nyquist_hz = 0.5 / trace.dt();
    if b > nyquist_hz * (1.0 + 1e-12) {
        return Err(OscError::AboveNyquist { bandwidth_hz: b, nyquist_hz });
    }
    let df = 1.0 / (trace.len() as f64 * trace.dt());
    if df > b / MIN_BINS_IN_BAND as f64 * (1.0 + 1e-12) {
        return Err(OscError::TooCoarse { df, bandwidth_hz: b, need: MIN_BINS_IN_BAND });
    }
    Ok(())
}

/// Sums the one-sided spectra over `0 < f <= B` (DC too with `include_dc`).
pub fn band_sums(speed: &SignalTrace, power: &SignalTrace, cfg: &OscConfig) -> Result<BandSums> {
    if !speed.same_grid(power) {
        return Err(OscError::Mismatch);
    }
    check_band(speed, cfg)?;
    let ws = dft(speed)?;
    let ps = dft(power)?;
    let zero = Complex64::new(0.0, 0.0);
    let mut sums = BandSums { w: zero, dw: zero, p: zero, bins: 0 };
    let lo = if cfg.include_dc { -ws.df() } else { 0.0 };
    for k in ws.band(lo, cfg.bandwidth_hz) {
        let w = ws.coefficients[k];
        sums.w += w;
        sums.dw += Complex64::new(0.0, 2.0 * PI * ws.frequencies[k]) * w;
        sums.p += ps.coefficients[k];
        sums.bins += 1;
    }
    Ok(sums)
}

/// Solves the band-summed balance `2H dW + D W + P = 0` for one area.
///
/// Errors are per-area failure reasons.
pub fn estimate_area(
    speed: &SignalTrace,
    power: &SignalTrace,
    cfg: &OscConfig,
) -> std::result::Result<OscSolution, String> {
    let s = band_sums(speed, power, cfg).map_err(|e| e.to_string())?;
    let (w, dw, p) = (s.w, s.dw, s.p);
    let num = 0.5 * (w.re * p.im - p.re * w.im);
    let den = dw.re * w.im - w.re * dw.im;
    let scale = (dw.re * w.im).abs() + (w.re * dw.im).abs();
    if !(den.abs() > DENOM_RTOL * scale) || !den.is_finite() {
        return Err("no resolvable oscillation".into());
    }
    let h = num / den;
    // back-substitute into whichever part of the balance carries more of W
    let d = if w.im.abs() >= w.re.abs() {
        -(p.im + 2.0 * h * dw.im) / w.im
    } else {
        -(p.re + 2.0 * h * dw.re) / w.re
    };
    if !(h.is_finite() && h > 0.0) {
        return Err(format!("non-positive inertia (H = {h:.6e})"));
    }
    Ok(OscSolution { h, d, sums: s })
}

/// Oscillation-based estimate for every area. Configuration problems that
/// affect all areas alike (band above Nyquist, too few bins) are errors.
pub fn estimate(dataset: &AreaDataset, cfg: &OscConfig) -> Result<InertiaEstimate> {
    if dataset.n_areas() > 0 {
        check_band(dataset.speed(0), cfg)?;
    }
    let areas = dataset
        .area_ids()
        .iter()
        .enumerate()
        .map(|(i, area)| match estimate_area(dataset.speed(i), dataset.power(i), cfg) {
            Ok(sol) => AreaEstimate {
                area: area.clone(),
                result: AreaResult::from_h(sol.h, Some(sol.d)),
                diagnostics: json!({
                    "bins": sol.sums.bins,
                    "sum_w": [sol.sums.w.re, sol.sums.w.im],
                    "sum_dw": [sol.sums.dw.re, sol.sums.dw.im],
                    "sum_p": [sol.sums.p.re, sol.sums.p.im],
                }),
            },
            Err(reason) => AreaEstimate {
                area: area.clone(),
                result: AreaResult::failed(reason),
                diagnostics: serde_json::Value::Null,
            },
        })
        .collect();
    Ok(InertiaEstimate {
        method: Method::Osc,
        areas,
        diagnostics: json!({
            "bandwidth_hz": cfg.bandwidth_hz,
            "include_dc": cfg.include_dc,
            "df_hz": 1.0 / (dataset.len() as f64 * dataset.dt()),
        }),
    })
}
