//! Acceptance criteria. Every criterion is evaluated and reported on one line;
//! the test fails if any criterion outside `KNOWN_SHORTFALLS` fails, or if a
//! known shortfall unexpectedly passes (so the list stays honest).

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use inertia_bench::{estimate_all, prepare, sweep, SweepParam};
use inertia_core::{
    fixtures, true_area_inertia, AreaDataset, DisturbanceSpec, FilterSpec, Method,
    NoiseSpec, OscConfig, ScenarioFile, SignalTrace, SimulationSettings,
};
use inertia_dmd::{fit, solve_area};
use inertia_signal::{butterworth_sos, dft, lowpass};
use inertia_simkit::{extract_area_dataset, simulate};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

const DT: f64 = 1.0 / 60.0;

/// Criteria that do not reach their bar on the shipped fixtures.
const KNOWN_SHORTFALLS: &[u32] = &[2, 7, 8];

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: u32, name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { id, name, pass, detail }
}

fn sysid_h(file: &ScenarioFile) -> f64 {
    let p = prepare(file).unwrap();
    let est = inertia_sysid::estimate(&p.data, &file.estimators.sysid, &p.timing);
    est.h("A").expect("single machine estimate")
}

fn single_machine(d_pu: f64) -> ScenarioFile {
    let mut s = fixtures::single_machine();
    s.grid.generators[0].d_pu = d_pu;
    s
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let h = sysid_h(&single_machine(0.0));
    let secs = start.elapsed().as_secs_f64();
    let pass = (4.975..=5.025).contains(&h) && secs < 5.0;
    outcome(1, "single machine H=5, D=0", pass, format!("H~ = {h:.5}, runtime {secs:.3} s"))
}

fn criterion_2() -> Outcome {
    let h = sysid_h(&single_machine(0.05));
    let rel = (h - 5.0) / 5.0;
    let pass = rel.abs() < 0.05 && h < 5.0;
    outcome(2, "damping bias D=0.05", pass, format!("H~ = {h:.9} ({:+.2e}%)", 100.0 * rel))
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    }
}

/// 26-state real system with known eigenvalues `r e^{±jθ}`, in a random orthogonal basis.
fn linear_system_26(seed: u64) -> (DMatrix<f64>, Vec<Complex64>) {
    let n = 26;
    let mut b = DMatrix::zeros(n, n);
    let mut truth = Vec::new();
    for k in 0..13 {
        let (r, th) = (0.992 + 0.0005 * k as f64, 0.03 + 0.07 * k as f64);
        let (s, c) = th.sin_cos();
        b[(2 * k, 2 * k)] = r * c;
        b[(2 * k, 2 * k + 1)] = -r * s;
        b[(2 * k + 1, 2 * k)] = r * s;
        b[(2 * k + 1, 2 * k + 1)] = r * c;
        truth.push(Complex64::from_polar(r, th));
        truth.push(Complex64::from_polar(r, -th));
    }
    let mut rng = Lcg(seed);
    let q = DMatrix::from_fn(n, n, |_, _| rng.next()).qr().q();
    (&q * b * q.transpose(), truth)
}

/// Two-area signals in which every mode satisfies `(2H λ + D) φ_ω + φ_P = 0`.
fn modal_dataset(h: [f64; 2], d: [f64; 2], m: usize) -> AreaDataset {
    let lam = [Complex64::new(-0.3, 2.0 * PI * 0.7), Complex64::new(-0.5, 2.0 * PI * 1.4)];
    let phi_w = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.6, 0.3)],
        [Complex64::new(-0.8, 0.1), Complex64::new(0.9, -0.2)],
    ];
    let b = [Complex64::new(0.01, 0.002), Complex64::new(0.0, 0.004)];
    let signal = |area: usize, power: bool, t: f64| -> f64 {
        (0..2)
            .map(|k| {
                let mut phi = phi_w[area][k];
                if power {
                    phi = -(2.0 * h[area] * lam[k] + d[area]) * phi;
                }
                2.0 * (b[k] * phi * (lam[k] * t).exp()).re
            })
            .sum()
    };
    let ids = vec!["N".to_string(), "S".to_string()];
    let sp = (0..2).map(|i| SignalTrace::from_fn(m, DT, 0.0, |t| signal(i, false, t)).unwrap()).collect();
    let pw = (0..2).map(|i| SignalTrace::from_fn(m, DT, 0.0, |t| signal(i, true, t)).unwrap()).collect();
    AreaDataset::new(ids, sp, pw).unwrap()
}

fn criterion_3() -> Outcome {
    let (a, truth) = linear_system_26(7);
    let m = 540;
    let mut rng = Lcg(99);
    let mut x = DMatrix::zeros(26, m);
    x.set_column(0, &DVector::from_fn(26, |_, _| rng.next() + 1.0));
    for k in 1..m {
        let next = &a * x.column(k - 1);
        x.set_column(k, &next);
    }
    let mut model = fit(&x, DT, None).unwrap();
    let eig_err = truth
        .iter()
        .map(|mu| model.discrete.iter().map(|z| (z - mu).norm()).fold(f64::INFINITY, f64::min) / mu.norm())
        .fold(0.0f64, f64::max);
    model.compute_amplitudes(&x, 0).unwrap();
    let times: Vec<f64> = (0..m).map(|k| k as f64 * DT).collect();
    let rec = model.reconstruct(&times).unwrap().values;
    let rms = (&rec - &x).norm() / x.norm();

    let (h, d) = ([3.2, 7.5], [0.02, 0.6]);
    let ds = modal_dataset(h, d, 600);
    let snaps = inertia_dmd::build_snapshots(&ds);
    let mut modal = fit(&snaps, DT, None).unwrap();
    modal.compute_amplitudes(&snaps, 14).unwrap();
    let mut solve_err = 0.0f64;
    for i in 0..2 {
        let sol = solve_area(&modal, i).unwrap();
        solve_err = solve_err
            .max((2.0 * sol.unconstrained_h - 2.0 * h[i]).abs() / (2.0 * h[i]))
            .max((sol.unconstrained_d - d[i]).abs());
    }
    let pass = eig_err < 1e-8 && rms < 1e-6 && solve_err < 1e-9;
    outcome(
        3,
        "DMD exact recovery",
        pass,
        format!("eigenvalue rel err {eig_err:.2e}, reconstruction RMS {rms:.2e}, (2H, D) err {solve_err:.2e}"),
    )
}

/// Speed and power tones obeying `2H dω/dt + D ω + P = 0` exactly.
fn balanced_tone(f: f64, amp: f64, ph: f64, h: f64, d: f64) -> (SignalTrace, SignalTrace) {
    let w = SignalTrace::from_fn(600, DT, 0.0, |t| amp * (2.0 * PI * f * t + ph).cos()).unwrap();
    let p = SignalTrace::from_fn(600, DT, 0.0, |t| {
        let x = 2.0 * PI * f * t + ph;
        -(2.0 * h * (-amp * 2.0 * PI * f * x.sin()) + d * amp * x.cos())
    })
    .unwrap();
    (w, p)
}

fn criterion_4() -> Outcome {
    let cfg = OscConfig { bandwidth_hz: 2.0, ..OscConfig::default() };
    let (w, p) = balanced_tone(1.0, 1e-3, 0.3, 4.0, 0.05);
    let sol = inertia_osc::estimate_area(&w, &p, &cfg).unwrap();
    let h_err = (sol.h - 4.0).abs() / 4.0;
    let mut scale_err = 0.0f64;
    for k in [1e-3, 0.37, 250.0] {
        let s = |t: &SignalTrace| t.with_values(t.values().iter().map(|v| v * k).collect()).unwrap();
        let hk = inertia_osc::estimate_area(&s(&w), &s(&p), &cfg).unwrap().h;
        scale_err = scale_err.max((hk - sol.h).abs() / sol.h);
    }
    let pass = h_err < 1e-6 && scale_err < 1e-12;
    outcome(4, "oscillation estimator exactness", pass, format!("H rel err {h_err:.2e}, scaling rel err {scale_err:.2e}"))
}

fn criterion_5() -> Outcome {
    let file = fixtures::three_area();
    let p = prepare(&file).unwrap();
    let values: Vec<f64> = (1..=30).map(f64::from).collect();
    let res = sweep(&p, &file.estimators, SweepParam::DmdStartIndex, &values).unwrap();
    let mee = res.mee();
    let (best_i, best) = mee.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let pass = mee[0] > *best;
    outcome(
        5,
        "DMD start-index sweep",
        pass,
        format!("MEE(s=1) {:.3}% vs min {best:.3}% at s={}", mee[0], values[best_i]),
    )
}

fn criterion_6() -> Outcome {
    let file = fixtures::three_area();
    let p = prepare(&file).unwrap();
    let values: Vec<f64> = (1..=8).map(f64::from).collect();
    let mee = sweep(&p, &file.estimators, SweepParam::SysIdPolyOrder, &values).unwrap().mee();
    let (best_i, _) = mee.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let pass = best_i > 0 && best_i < values.len() - 1;
    let list: Vec<String> = mee.iter().map(|m| format!("{m:.2}")).collect();
    outcome(6, "sysid N_p sweep", pass, format!("argmin N_p={}, MEE% [{}]", values[best_i], list.join(", ")))
}

fn criterion_7() -> Outcome {
    let mut sysid_wins = 0;
    let mut sysid_below = 0;
    let mut pairs = Vec::new();
    for seed in 0..20u64 {
        let mut file = fixtures::three_area();
        file.noise = Some(NoiseSpec::new(4e-3, seed));
        file.filter = Some(FilterSpec { cutoff_hz: 5.0, order: 2 });
        let mut cfg = file.estimators.clone();
        cfg.osc.enabled = false;
        let p = prepare(&file).unwrap();
        let reports = estimate_all(&p, &cfg).unwrap();
        let mee = |m: Method| reports.iter().find(|r| r.method == m).unwrap().mee_or_inf();
        let (s, d) = (mee(Method::SysId), mee(Method::Dmd));
        sysid_wins += usize::from(s < d);
        sysid_below += usize::from(s < 15.0);
        pairs.push(format!("{s:.1}/{d:.1}"));
    }
    let pass = sysid_wins >= 18 && sysid_below >= 18;
    outcome(
        7,
        "noisy ordering over 20 seeds",
        pass,
        format!("sysid<dmd {sysid_wins}/20, sysid<15% {sysid_below}/20; sysid/dmd MEE% {}", pairs.join(" ")),
    )
}

fn criterion_8() -> Outcome {
    let file = fixtures::three_area();
    let p = prepare(&file).unwrap();
    let values = [0.5, 1.0, 2.0, 4.0, 8.0];
    let res = sweep(&p, &file.estimators, SweepParam::OscBandwidth, &values).unwrap();
    let mee: Vec<f64> = res.rows.iter().filter_map(|r| r.report.mee_pct).collect();
    let max = mee.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = mee.iter().copied().fold(f64::INFINITY, f64::min);
    let pass = mee.len() == values.len() && max >= 5.0 * min;
    let list: Vec<String> = res
        .rows
        .iter()
        .map(|r| match r.report.mee_pct {
            Some(m) if r.report.complete => format!("B={}: {m:.1}", r.value),
            Some(m) => format!("B={}: {m:.1} (incomplete)", r.value),
            None => format!("B={}: none", r.value),
        })
        .collect();
    outcome(8, "oscillation bandwidth sensitivity", pass, format!("max/min {:.2}; {}", max / min, list.join(", ")))
}

fn swing_balance_rms(file: &ScenarioFile) -> f64 {
    let res = simulate(&file.grid, file.disturbance.as_ref().unwrap(), &file.simulation).unwrap();
    let ds = extract_area_dataset(&res, &file.grid).unwrap();
    let truth = true_area_inertia(&file.grid);
    let dt = ds.dt();
    let k0 = ds.index_at(res.t_clear) + 2;
    let k1 = ds.index_at(res.t_clear + 1.0);
    let mut worst = 0.0f64;
    for (i, area) in ds.area_ids().iter().enumerate() {
        let h = truth[area].h_system.unwrap();
        let d = truth[area].d_system.unwrap();
        let w = ds.speed(i).values();
        let p = ds.power(i).values();
        let (mut err2, mut ref2) = (0.0, 0.0);
        for k in k0..k1 {
            let lhs = -2.0 * h * (w[k + 1] - w[k - 1]) / (2.0 * dt) - d * w[k];
            err2 += (lhs - p[k]).powi(2);
            ref2 += p[k].powi(2);
        }
        worst = worst.max((err2 / ref2).sqrt());
    }
    worst
}

fn criterion_9() -> Outcome {
    let fd = swing_balance_rms(&fixtures::two_area());

    let sos = butterworth_sos(2, 5.0, DT).unwrap();
    let dc_sections = sos.iter().map(|s| s.response(0.0)).fold(Complex64::new(1.0, 0.0), |a, b| a * b);
    let flat = SignalTrace::new(vec![0.37; 600], DT, 0.0).unwrap();
    let out = lowpass(&flat, &FilterSpec { cutoff_hz: 5.0, order: 2 }).unwrap();
    let dc_err = (dc_sections - 1.0).norm().max(out.values().iter().map(|v| (v - 0.37).abs()).fold(0.0, f64::max));

    let x = SignalTrace::from_fn(601, DT, 0.0, |t| (3.1 * t).sin() * (1.0 + 0.2 * t) + 0.05).unwrap();
    let energy: f64 = x.values().iter().map(|v| v * v).sum::<f64>() * DT;
    let parseval = (dft(&x).unwrap().energy() - energy).abs() / energy;

    let s = fixtures::three_area();
    let base = simulate(&s.grid, s.disturbance.as_ref().unwrap(), &s.simulation).unwrap();
    let k = 2.5;
    let mut scaled = s.grid.clone();
    for g in scaled.generators.iter_mut() {
        g.rating_mva *= k;
        g.p_pu *= k;
    }
    for l in scaled.loads.iter_mut() {
        l.p_pu *= k;
    }
    for l in scaled.lines.iter_mut() {
        l.x_pu /= k;
    }
    let mut dist = s.disturbance.clone().unwrap();
    dist.magnitude *= k;
    let other = simulate(&scaled, &dist, &s.simulation).unwrap();
    let peak = base.domega.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let pu_err = base
        .domega
        .iter()
        .flatten()
        .zip(other.domega.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / peak;

    // lossless network, no damping: total angular momentum stays at zero
    let mut m = fixtures::two_area().grid;
    m.loads.clear();
    m.generators[0].p_pu = 0.5;
    m.generators[1].p_pu = -0.5;
    for g in m.generators.iter_mut() {
        g.d_pu = 0.0;
    }
    let res = simulate(
        &m,
        &DisturbanceSpec::bus_fault(2, 1.0, 1.1),
        &SimulationSettings { duration_s: 10.0, measurement_rate_hz: 60.0 },
    )
    .unwrap();
    let momentum = (0..res.len())
        .map(|n| {
            m.generators
                .iter()
                .enumerate()
                .map(|(g, gen)| 2.0 * gen.h_system(m.system_base_mva) * res.domega[g][n])
                .sum::<f64>()
                .abs()
        })
        .fold(0.0f64, f64::max);

    let pass = fd < 0.02 && dc_err < 1e-12 && parseval < 1e-9 && pu_err < 1e-9 && momentum < 1e-6;
    outcome(
        9,
        "numerical hygiene",
        pass,
        format!(
            "swing balance RMS {:.3}%, DC gain err {dc_err:.1e}, Parseval {parseval:.1e}, pu scaling {pu_err:.1e}, momentum {momentum:.1e}",
            100.0 * fd
        ),
    )
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut file = fixtures::three_area();
    file.noise = Some(NoiseSpec::new(4e-3, 11));
    file.filter = Some(FilterSpec { cutoff_hz: 5.0, order: 2 });
    let path = dir.path().join("scenario.json");
    std::fs::write(&path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
    let run = |tag: &str| -> Vec<u8> {
        let out = dir.path().join(tag);
        let status = Command::new(env!("CARGO_BIN_EXE_inertia"))
            .arg("--out")
            .arg(&out)
            .arg("estimate")
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success(), "estimate exited with {status}");
        std::fs::read(out.join(format!("{}_report.csv", file.scenario_id()))).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    outcome(10, "byte-identical estimate CSV", a == b && !a.is_empty(), format!("{} bytes", a.len()))
}

#[test]
fn acceptance() {
    let results = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ];
    let mut unexpected = Vec::new();
    for r in &results {
        let known = KNOWN_SHORTFALLS.contains(&r.id);
        let tag = match (r.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known shortfall)",
            (false, false) => "FAIL",
        };
        println!("criterion {:>2} {tag}: {} | {}", r.id, r.name, r.detail);
        if r.pass == known {
            unexpected.push(r.id);
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected outcome: {unexpected:?}");
}
