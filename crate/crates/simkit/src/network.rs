//! Operating point, bus admittance matrix and Kron reduction.

use std::collections::HashMap;

use inertia_core::linalg::CMatrix;
use inertia_core::{DisturbanceKind, DisturbanceSpec, GridModel};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SimError};

const PF_TOL: f64 = 1e-12;
const PF_MAX_ITER: usize = 50;

/// Solved pre-disturbance state of the network.
#[derive(Debug, Clone, Serialize)]
pub struct OperatingPoint {
    /// Complex bus voltages, in `model.buses` order.
    #[serde(skip)]
    pub bus_voltage: Vec<Complex64>,
    /// Internal EMF phasor per generator.
    #[serde(skip)]
    pub emf: Vec<Complex64>,
    /// Electrical power per generator, system base.
    pub gen_p: Vec<f64>,
    /// Reactive power per generator, system base.
    pub gen_q: Vec<f64>,
    /// Constant-impedance load conductance per bus.
    pub load_g: Vec<f64>,
    /// Slack generator index and the power it picked up beyond its set point.
    pub slack: usize,
    pub slack_mismatch: f64,
    pub iterations: usize,
}

impl OperatingPoint {
    pub fn emf_magnitude(&self) -> Vec<f64> {
        self.emf.iter().map(|e| e.norm()).collect()
    }

    pub fn rotor_angle(&self) -> Vec<f64> {
        self.emf.iter().map(|e| e.arg()).collect()
    }
}

fn line_ybus(model: &GridModel, index: &HashMap<u32, usize>) -> CMatrix {
    let n = model.buses.len();
    let mut y = CMatrix::zeros(n, n);
    for l in &model.lines {
        let (a, b) = (index[&l.from], index[&l.to]);
        let yl = Complex64::new(0.0, -1.0 / l.x_pu);
        y[(a, a)] += yl;
        y[(b, b)] += yl;
        y[(a, b)] -= yl;
        y[(b, a)] -= yl;
    }
    y
}

/// Newton-Raphson power flow with generator buses as PV (slack = bus of the
/// largest generator) and load buses as PQ with zero reactive demand.
pub fn solve_operating_point(model: &GridModel) -> Result<OperatingPoint> {
    model.check()?;
    let index = model.bus_index();
    let n = model.buses.len();
    let base = model.system_base_mva;
    let y = line_ybus(model, &index);
    let g = y.map(|z| z.re);
    let b = y.map(|z| z.im);

    let slack_gen = model
        .generators
        .iter()
        .enumerate()
        .fold(0, |best, (i, gen)| {
            if gen.rating_mva > model.generators[best].rating_mva {
                i
            } else {
                best
            }
        });
    let slack_bus = index[&model.generators[slack_gen].bus];

    let mut p_spec = vec![0.0; n];
    let mut v_set: Vec<Option<f64>> = vec![None; n];
    for gen in &model.generators {
        let k = index[&gen.bus];
        p_spec[k] += gen.p_pu;
        v_set[k].get_or_insert(gen.v_setpoint_pu);
    }
    let mut p_load = vec![0.0; n];
    for l in &model.loads {
        let k = index[&l.bus];
        p_spec[k] -= l.p_pu;
        p_load[k] += l.p_pu;
    }

    let mut vm: Vec<f64> = (0..n).map(|k| v_set[k].unwrap_or(1.0)).collect();
    let mut va = vec![0.0; n];
    let theta_idx: Vec<usize> = (0..n).filter(|&k| k != slack_bus).collect();
    let vm_idx: Vec<usize> = (0..n).filter(|&k| v_set[k].is_none()).collect();
    let nt = theta_idx.len();
    let nu = nt + vm_idx.len();

    let injections = |vm: &[f64], va: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        for i in 0..n {
            for k in 0..n {
                let th = va[i] - va[k];
                let (s, c) = th.sin_cos();
                p[i] += vm[i] * vm[k] * (g[(i, k)] * c + b[(i, k)] * s);
                q[i] += vm[i] * vm[k] * (g[(i, k)] * s - b[(i, k)] * c);
            }
        }
        (p, q)
    };

    let mut iterations = 0;
    loop {
        let (p, q) = injections(&vm, &va);
        let mut mis = DVector::zeros(nu);
        for (r, &i) in theta_idx.iter().enumerate() {
            mis[r] = p_spec[i] - p[i];
        }
        for (r, &i) in vm_idx.iter().enumerate() {
            mis[nt + r] = -q[i];
        }
        let worst = mis.amax();
        if worst < PF_TOL {
            break;
        }
        if iterations >= PF_MAX_ITER || !worst.is_finite() {
            return Err(SimError::Equilibrium(format!(
                "power flow did not converge (mismatch {worst:.3e} after {iterations} iterations)"
            )));
        }
        iterations += 1;

        let mut jac = DMatrix::zeros(nu, nu);
        let col_theta: HashMap<usize, usize> = theta_idx.iter().enumerate().map(|(c, &k)| (k, c)).collect();
        let col_vm: HashMap<usize, usize> = vm_idx.iter().enumerate().map(|(c, &k)| (k, nt + c)).collect();
        let rows: Vec<(usize, usize, bool)> = theta_idx
            .iter()
            .enumerate()
            .map(|(r, &i)| (r, i, true))
            .chain(vm_idx.iter().enumerate().map(|(r, &i)| (nt + r, i, false)))
            .collect();
        for &(r, i, is_p) in &rows {
            for k in 0..n {
                let th = va[i] - va[k];
                let (s, c) = th.sin_cos();
                let (gik, bik) = (g[(i, k)], b[(i, k)]);
                let (d_theta, d_vm) = if i == k {
                    if is_p {
                        (-q[i] - bik * vm[i] * vm[i], p[i] / vm[i] + gik * vm[i])
                    } else {
                        (p[i] - gik * vm[i] * vm[i], q[i] / vm[i] - bik * vm[i])
                    }
                } else if is_p {
                    (vm[i] * vm[k] * (gik * s - bik * c), vm[i] * (gik * c + bik * s))
                } else {
                    (-vm[i] * vm[k] * (gik * c + bik * s), vm[i] * (gik * s - bik * c))
                };
                if let Some(&cidx) = col_theta.get(&k) {
                    jac[(r, cidx)] = d_theta;
                }
                if let Some(&cidx) = col_vm.get(&k) {
                    jac[(r, cidx)] = d_vm;
                }
            }
        }
        let step = jac
            .lu()
            .solve(&mis)
            .ok_or_else(|| SimError::Equilibrium("singular power-flow Jacobian".into()))?;
        for (c, &k) in theta_idx.iter().enumerate() {
            va[k] += step[c];
        }
        for (c, &k) in vm_idx.iter().enumerate() {
            vm[k] += step[nt + c];
            if !(vm[k] > 0.05) {
                return Err(SimError::Equilibrium(format!(
                    "voltage collapse at bus {} during power flow",
                    model.buses[k].id
                )));
            }
        }
    }

    let v: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(vm[k], va[k])).collect();
    let (p_inj, q_inj) = injections(&vm, &va);

    // split each bus's generation across its machines
    let mut gen_p = vec![0.0; model.generators.len()];
    let mut gen_q = vec![0.0; model.generators.len()];
    let mut slack_mismatch = 0.0;
    for k in 0..n {
        let at_bus: Vec<usize> = model
            .generators
            .iter()
            .enumerate()
            .filter(|(_, gen)| index[&gen.bus] == k)
            .map(|(i, _)| i)
            .collect();
        if at_bus.is_empty() {
            continue;
        }
        let p_total = p_inj[k] + p_load[k];
        let set: f64 = at_bus.iter().map(|&i| model.generators[i].p_pu).sum();
        let rating: f64 = at_bus.iter().map(|&i| model.generators[i].rating_mva).sum();
        if k == slack_bus {
            slack_mismatch = p_total - set;
        }
        for &i in &at_bus {
            let share = model.generators[i].rating_mva / rating;
            gen_p[i] = model.generators[i].p_pu + share * (p_total - set);
            gen_q[i] = share * q_inj[k];
        }
    }

    let emf: Vec<Complex64> = model
        .generators
        .iter()
        .enumerate()
        .map(|(i, gen)| {
            let vb = v[index[&gen.bus]];
            let s = Complex64::new(gen_p[i], gen_q[i]);
            let current = (s / vb).conj();
            vb + Complex64::new(0.0, gen.xd_system(base)) * current
        })
        .collect();

    let load_g = (0..n)
        .map(|k| if p_load[k] != 0.0 { p_load[k] / (vm[k] * vm[k]) } else { 0.0 })
        .collect();

    Ok(OperatingPoint {
        bus_voltage: v,
        emf,
        gen_p,
        gen_q,
        load_g,
        slack: slack_gen,
        slack_mismatch,
        iterations,
    })
}

/// Reduced admittance matrices between generator internal nodes.
#[derive(Debug, Clone)]
pub struct ReducedNetwork {
    pub pre: CMatrix,
    /// Present iff the disturbance is a bus fault.
    pub fault: Option<CMatrix>,
    pub post: CMatrix,
    /// Internal EMF magnitudes, pu.
    pub emf: Vec<f64>,
    /// Initial rotor angles, rad.
    pub delta0: Vec<f64>,
    /// Generator ids in matrix row order.
    pub gen_ids: Vec<String>,
    /// Extra shunt conductance switched in by a load step (zero otherwise).
    pub load_step_conductance: f64,
    pub operating_point: OperatingPoint,
}

impl ReducedNetwork {
    pub fn size(&self) -> usize {
        self.emf.len()
    }

    /// Network with no disturbance at all: pre, post identical, no fault.
    pub fn undisturbed(model: &GridModel) -> Result<Self> {
        let op = solve_operating_point(model)?;
        let index = model.bus_index();
        let pre = reduce(model, &index, &op.load_g, &[])?;
        Ok(Self {
            post: pre.clone(),
            pre,
            fault: None,
            emf: op.emf_magnitude(),
            delta0: op.rotor_angle(),
            gen_ids: model.generators.iter().map(|g| g.id.clone()).collect(),
            load_step_conductance: 0.0,
            operating_point: op,
        })
    }
}

/// Electrical power out of each internal node for the given angles.
pub fn electrical_power(y: &CMatrix, emf: &[f64], delta: &[f64], out: &mut [f64]) {
    let n = emf.len();
    for i in 0..n {
        let mut acc = 0.0;
        for k in 0..n {
            let yik = y[(i, k)];
            let (s, c) = (delta[i] - delta[k]).sin_cos();
            acc += emf[k] * (yik.re * c + yik.im * s);
        }
        out[i] = emf[i] * acc;
    }
}

fn total_power(y: &CMatrix, emf: &[f64], delta: &[f64]) -> f64 {
    let mut p = vec![0.0; emf.len()];
    electrical_power(y, emf, delta, &mut p);
    p.iter().sum()
}

/// Kron-reduces `Y_gg - Y_gb Y_bb^-1 Y_bg` with extra shunts `(bus index,
/// admittance)` applied on top of the line/load/generator admittances.
fn reduce(
    model: &GridModel,
    index: &HashMap<u32, usize>,
    load_g: &[f64],
    extra_shunts: &[(usize, Complex64)],
) -> Result<CMatrix> {
    let base = model.system_base_mva;
    let ng = model.generators.len();
    let mut ybb = line_ybus(model, index);
    for (k, &gl) in load_g.iter().enumerate() {
        ybb[(k, k)] += Complex64::new(gl, 0.0);
    }
    for &(k, y) in extra_shunts {
        ybb[(k, k)] += y;
    }
    let nb = ybb.nrows();
    let mut ygg = CMatrix::zeros(ng, ng);
    let mut ybg = CMatrix::zeros(nb, ng);
    for (i, gen) in model.generators.iter().enumerate() {
        let yg = Complex64::new(0.0, -1.0 / gen.xd_system(base));
        let k = index[&gen.bus];
        ygg[(i, i)] = yg;
        ybb[(k, k)] += yg;
        ybg[(k, i)] = -yg;
    }
    let scale = ybb.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lu = ybb.lu();
    let solved = lu.solve(&ybg).ok_or_else(|| {
        SimError::Structural("bus admittance block is singular (islanded bus?)".into())
    })?;
    if solved.iter().any(|z| !z.is_finite()) || solved.iter().map(|z| z.norm()).fold(0.0, f64::max) > 1e14 * (1.0 + scale) {
        return Err(SimError::Structural(
            "bus admittance block is numerically singular (islanded bus?)".into(),
        ));
    }
    let yred = ygg - ybg.transpose() * solved;
    Ok(yred)
}

/// Pre-, fault-on and post-disturbance reduced networks for a scenario.
///
/// A load step is a shunt conductance added at the disturbance bus after
/// `t_start`, sized so that the generators' total electrical power at the
/// pre-disturbance rotor angles rises by exactly `magnitude`. A bus fault is a
/// large lossless shunt susceptance (`-j * magnitude`) at the bus while the
/// fault is applied; the post-fault network equals the pre-fault network.
pub fn kron_reduce(model: &GridModel, disturbance: &DisturbanceSpec) -> Result<ReducedNetwork> {
    model.check()?;
    disturbance.check()?;
    let index = model.bus_index();
    let bus = *index.get(&disturbance.bus).ok_or_else(|| {
        SimError::Invalid(format!("disturbance bus {} does not exist", disturbance.bus))
    })?;
    let op = solve_operating_point(model)?;
    let emf = op.emf_magnitude();
    let delta0 = op.rotor_angle();
    let pre = reduce(model, &index, &op.load_g, &[])?;

    let (fault, post, g_step) = match disturbance.kind {
        DisturbanceKind::BusFault => {
            let shunt = Complex64::new(0.0, -disturbance.magnitude);
            let on = reduce(model, &index, &op.load_g, &[(bus, shunt)])?;
            (Some(on), pre.clone(), 0.0)
        }
        DisturbanceKind::LoadStep => {
            let p0 = total_power(&pre, &emf, &delta0);
            let target = disturbance.magnitude;
            let excess = |gs: f64| -> Result<f64> {
                let y = reduce(model, &index, &op.load_g, &[(bus, Complex64::new(gs, 0.0))])?;
                Ok(total_power(&y, &emf, &delta0) - p0 - target)
            };
            let vb = op.bus_voltage[bus].norm();
            let gs = secant(excess, target / (vb * vb), 1.05 * target / (vb * vb))?;
            let post = reduce(model, &index, &op.load_g, &[(bus, Complex64::new(gs, 0.0))])?;
            (None, post, gs)
        }
    };

    Ok(ReducedNetwork {
        pre,
        fault,
        post,
        emf,
        delta0,
        gen_ids: model.generators.iter().map(|g| g.id.clone()).collect(),
        load_step_conductance: g_step,
        operating_point: op,
    })
}

fn secant(f: impl Fn(f64) -> Result<f64>, mut x0: f64, mut x1: f64) -> Result<f64> {
    let mut f0 = f(x0)?;
    let mut f1 = f(x1)?;
    for _ in 0..100 {
        if f1.abs() < 1e-14 {
            return Ok(x1);
        }
        let denom = f1 - f0;
        if denom == 0.0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / denom;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1)?;
    }
    if f1.abs() < 1e-10 {
        Ok(x1)
    } else {
        Err(SimError::Equilibrium(format!(
            "could not size the load step (residual {f1:.3e} pu)"
        )))
    }
}
