//! Fixed-step RK4 integration of the classical swing equations.

use std::f64::consts::PI;
use std::fmt::Write as _;

use inertia_core::linalg::CMatrix;
use inertia_core::{DisturbanceKind, DisturbanceSpec, GridModel, SimulationSettings};
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::network::{electrical_power, kron_reduce, OperatingPoint, ReducedNetwork};

/// Upper bound on the internal integration step.
pub const MAX_INTERNAL_STEP_S: f64 = 1e-3;

/// Internal step and sampling layout derived from the measurement rate.
///
/// The internal step is the largest `h <= 1 ms` that divides the measurement
/// period exactly, so every sample falls on the integration grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepPlan {
    pub h: f64,
    pub substeps: usize,
    pub samples: usize,
}

impl StepPlan {
    pub fn new(settings: &SimulationSettings) -> Result<Self> {
        let rate = settings.measurement_rate_hz;
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(SimError::Invalid("measurement rate must be positive".into()));
        }
        if !(settings.duration_s > 0.0) {
            return Err(SimError::Invalid("duration must be positive".into()));
        }
        let period = 1.0 / rate;
        let substeps = ((period / MAX_INTERNAL_STEP_S) - 1e-9).ceil().max(1.0) as usize;
        let samples = (settings.duration_s * rate).round() as usize + 1;
        Ok(Self {
            h: period / substeps as f64,
            substeps,
            samples,
        })
    }

    pub fn dt(&self) -> f64 {
        self.h * self.substeps as f64
    }

    /// Nearest internal step index to time `t`.
    pub fn snap(&self, t: f64) -> usize {
        (t / self.h).round().max(0.0) as usize
    }
}

/// Sampled trajectories of one simulation run.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationResult {
    pub time: Vec<f64>,
    pub dt: f64,
    pub gen_ids: Vec<String>,
    /// `[gen][sample]`, rad.
    pub delta: Vec<Vec<f64>>,
    /// `[gen][sample]`, pu speed deviation.
    pub domega: Vec<Vec<f64>>,
    /// `[gen][sample]`, electrical power on the system base.
    pub gen_pe: Vec<Vec<f64>>,
    pub area_ids: Vec<String>,
    /// `[area][sample]`, electrical power out of the area's machines, system base.
    pub area_pe: Vec<Vec<f64>>,
    /// Disturbance start / end of topology changes, snapped to the step grid.
    pub t_disturbance: f64,
    pub t_clear: f64,
    pub internal_step: f64,
    /// Pre-disturbance operating point.
    pub steady_state: OperatingPoint,
    /// Mechanical power per generator, system base.
    pub mechanical_power: Vec<f64>,
}

impl SimulationResult {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// CSV with columns `t, gen_<id>_domega, gen_<id>_delta, area_<id>_Pe`,
    /// 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for id in &self.gen_ids {
            let _ = write!(out, ",gen_{id}_domega,gen_{id}_delta");
        }
        for id in &self.area_ids {
            let _ = write!(out, ",area_{id}_Pe");
        }
        out.push('\n');
        for k in 0..self.time.len() {
            out.push_str(&sig12(self.time[k]));
            for g in 0..self.gen_ids.len() {
                out.push(',');
                out.push_str(&sig12(self.domega[g][k]));
                out.push(',');
                out.push_str(&sig12(self.delta[g][k]));
            }
            for a in 0..self.area_ids.len() {
                out.push(',');
                out.push_str(&sig12(self.area_pe[a][k]));
            }
            out.push('\n');
        }
        out
    }
}

/// Formats with 12 significant digits.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Runs `model` through `disturbance` for `settings.duration_s` seconds.
pub fn simulate(
    model: &GridModel,
    disturbance: &DisturbanceSpec,
    settings: &SimulationSettings,
) -> Result<SimulationResult> {
    disturbance.check()?;
    if settings.duration_s < disturbance.settled_time() + 1.0 {
        return Err(SimError::Invalid(format!(
            "duration {} s must extend at least 1 s past {} s",
            settings.duration_s,
            disturbance.settled_time()
        )));
    }
    let net = kron_reduce(model, disturbance)?;
    let t_clear = match disturbance.kind {
        DisturbanceKind::BusFault => disturbance.t_clear_s.unwrap_or(disturbance.t_start_s),
        DisturbanceKind::LoadStep => disturbance.t_start_s,
    };
    simulate_reduced(model, &net, disturbance.t_start_s, t_clear, settings)
}

/// Integrates a pre-built reduced network: `pre` before `t_start`, `fault`
/// (if any) on `[t_start, t_clear)`, `post` afterwards.
pub fn simulate_reduced(
    model: &GridModel,
    net: &ReducedNetwork,
    t_start: f64,
    t_clear: f64,
    settings: &SimulationSettings,
) -> Result<SimulationResult> {
    let plan = StepPlan::new(settings)?;
    let ng = net.size();
    if ng != model.generators.len() {
        return Err(SimError::Invalid("reduced network does not match the model".into()));
    }
    let base = model.system_base_mva;
    let ws = 2.0 * PI * model.nominal_frequency_hz;
    let inertia: Vec<f64> = model.generators.iter().map(|g| 2.0 * g.h_system(base)).collect();
    let damping: Vec<f64> = model.generators.iter().map(|g| g.d_system(base)).collect();

    let emf = &net.emf;
    let mut pm = vec![0.0; ng];
    electrical_power(&net.pre, emf, &net.delta0, &mut pm);
    let op_gap = pm
        .iter()
        .zip(&net.operating_point.gen_p)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if op_gap > 1e-6 {
        return Err(SimError::Equilibrium(format!(
            "reduced network disagrees with the power flow by {op_gap:.3e} pu"
        )));
    }

    let k_start = plan.snap(t_start);
    let k_clear = plan.snap(t_clear).max(k_start);
    let network_at = |k: usize| -> &CMatrix {
        if k < k_start {
            &net.pre
        } else if k < k_clear {
            net.fault.as_ref().unwrap_or(&net.post)
        } else {
            &net.post
        }
    };

    let areas = model.generators_by_area();
    let mut res = SimulationResult {
        time: Vec::with_capacity(plan.samples),
        dt: plan.dt(),
        gen_ids: net.gen_ids.clone(),
        delta: vec![Vec::with_capacity(plan.samples); ng],
        domega: vec![Vec::with_capacity(plan.samples); ng],
        gen_pe: vec![Vec::with_capacity(plan.samples); ng],
        area_ids: areas.iter().map(|(a, _)| a.clone()).collect(),
        area_pe: vec![Vec::with_capacity(plan.samples); areas.len()],
        t_disturbance: k_start as f64 * plan.h,
        t_clear: k_clear as f64 * plan.h,
        internal_step: plan.h,
        steady_state: net.operating_point.clone(),
        mechanical_power: pm.clone(),
    };

    let mut delta = net.delta0.clone();
    let mut dw = vec![0.0; ng];
    let mut pe = vec![0.0; ng];
    let mut scratch = Rk4Scratch::new(ng);
    let total_steps = (plan.samples - 1) * plan.substeps;

    for k in 0..=total_steps {
        let y = network_at(k);
        if k % plan.substeps == 0 {
            electrical_power(y, emf, &delta, &mut pe);
            res.time.push((k / plan.substeps) as f64 * plan.dt());
            for g in 0..ng {
                res.delta[g].push(delta[g]);
                res.domega[g].push(dw[g]);
                res.gen_pe[g].push(pe[g]);
            }
            for (a, (_, idx)) in areas.iter().enumerate() {
                res.area_pe[a].push(idx.iter().map(|&g| pe[g]).sum());
            }
        }
        if k == total_steps {
            break;
        }
        let sys = Swing {
            y,
            emf,
            pm: &pm,
            inertia: &inertia,
            damping: &damping,
            ws,
        };
        scratch.step(&sys, &mut delta, &mut dw, plan.h);

        let (lo, hi) = delta
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
        if !(hi - lo <= PI) {
            return Err(SimError::Unstable {
                t: (k + 1) as f64 * plan.h,
                spread: hi - lo,
            });
        }
    }
    Ok(res)
}

struct Swing<'a> {
    y: &'a CMatrix,
    emf: &'a [f64],
    pm: &'a [f64],
    inertia: &'a [f64],
    damping: &'a [f64],
    ws: f64,
}

impl Swing<'_> {
    fn rhs(&self, delta: &[f64], dw: &[f64], pe: &mut [f64], d_delta: &mut [f64], d_dw: &mut [f64]) {
        electrical_power(self.y, self.emf, delta, pe);
        for g in 0..delta.len() {
            d_delta[g] = self.ws * dw[g];
            d_dw[g] = (self.pm[g] - pe[g] - self.damping[g] * dw[g]) / self.inertia[g];
        }
    }
}

struct Rk4Scratch {
    pe: Vec<f64>,
    k: [(Vec<f64>, Vec<f64>); 4],
    tmp_d: Vec<f64>,
    tmp_w: Vec<f64>,
}

impl Rk4Scratch {
    fn new(n: usize) -> Self {
        let z = || (vec![0.0; n], vec![0.0; n]);
        Self {
            pe: vec![0.0; n],
            k: [z(), z(), z(), z()],
            tmp_d: vec![0.0; n],
            tmp_w: vec![0.0; n],
        }
    }

    fn step(&mut self, sys: &Swing<'_>, delta: &mut [f64], dw: &mut [f64], h: f64) {
        let n = delta.len();
        let weights = [0.0, 0.5, 0.5, 1.0];
        for stage in 0..4 {
            if stage == 0 {
                self.tmp_d.copy_from_slice(delta);
                self.tmp_w.copy_from_slice(dw);
            } else {
                let (pd, pw) = &self.k[stage - 1];
                for g in 0..n {
                    self.tmp_d[g] = delta[g] + weights[stage] * h * pd[g];
                    self.tmp_w[g] = dw[g] + weights[stage] * h * pw[g];
                }
            }
            let (kd, kw) = &mut self.k[stage];
            sys.rhs(&self.tmp_d, &self.tmp_w, &mut self.pe, kd, kw);
        }
        for g in 0..n {
            delta[g] += h / 6.0
                * (self.k[0].0[g] + 2.0 * self.k[1].0[g] + 2.0 * self.k[2].0[g] + self.k[3].0[g]);
            dw[g] += h / 6.0
                * (self.k[0].1[g] + 2.0 * self.k[1].1[g] + 2.0 * self.k[2].1[g] + self.k[3].1[g]);
        }
    }
}
