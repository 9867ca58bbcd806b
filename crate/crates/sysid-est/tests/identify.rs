use inertia_core::{fixtures, DisturbanceSpec, EventTiming, SignalTrace, SysIdConfig};
use inertia_simkit::{extract_area_dataset, simulate};
use inertia_sysid::{
    estimate, estimate_area, fit_polynomial, identify, step_response, ContinuousModel,
    IdentifiedModel, SysIdError,
};
use nalgebra::{dmatrix, dvector, DVector};
use proptest::prelude::*;

const DT: f64 = 1.0 / 60.0;

/// Deterministic white-ish input (hash of the sample index).
fn broadband(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let v = (k as f64 * 12.9898 + 4.1414).sin() * 43758.5453;
            v - v.floor() - 0.5
        })
        .collect()
}

fn step_input(n: usize, at: usize, mag: f64) -> Vec<f64> {
    (0..n).map(|k| if k >= at { mag } else { 0.0 }).collect()
}

/// Discrete oracle simulation `x+ = A x + B u`, `y = C x + D u` from rest.
fn run_discrete(a: &nalgebra::DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>, d: f64, u: &[f64]) -> Vec<f64> {
    let mut x = DVector::zeros(a.nrows());
    u.iter()
        .map(|&uk| {
            let y = c.dot(&x) + d * uk;
            x = a * &x + b * uk;
            y
        })
        .collect()
}

fn trace(v: Vec<f64>) -> SignalTrace {
    SignalTrace::new(v, DT, 0.0).unwrap()
}

/// Swing-equation area `2H w' = -P - D w` driven by `p`, exact under
/// piecewise-constant input.
fn swing_response(h: f64, d: f64, p: &[f64]) -> Vec<f64> {
    let cont = ContinuousModel::new(
        dmatrix![-d / (2.0 * h)],
        dvector![1.0],
        dvector![-1.0 / (2.0 * h)],
        0.0,
    );
    let model = IdentifiedModel::from_continuous(cont, DT).unwrap();
    model.simulate(p, &DVector::zeros(1))
}

#[test]
fn recovers_second_order_system() {
    let a = dmatrix![1.6, -0.7; 1.0, 0.0];
    let b = dvector![1.0, 0.0];
    let c = dvector![0.05, 0.03];
    let u = broadband(600);
    let y = run_discrete(&a, &b, &c, 0.0, &u);
    let model = identify(&trace(u), &trace(y), 2).unwrap();
    assert_eq!(model.order(), 2);
    let mut got = model.eigenvalues().unwrap();
    // true eigenvalues 0.8 ± j 0.2449...
    let im = (0.7f64 - 0.64).sqrt();
    got.sort_by(|p, q| p.im.partial_cmp(&q.im).unwrap());
    assert!((got[0].re - 0.8).abs() < 1e-6 && (got[0].im + im).abs() < 1e-6, "{got:?}");
    assert!((got[1].re - 0.8).abs() < 1e-6 && (got[1].im - im).abs() < 1e-6);
    assert!(model.fit_pct >= 99.9, "fit {}", model.fit_pct);
    assert!(!model.unstable);
}

#[test]
fn integrator_data_gives_initial_slope() {
    let u = step_input(600, 60, 0.1);
    let y = swing_response(5.0, 0.0, &u);
    let model = identify(&trace(u), &trace(y), 2).unwrap();
    let cont = model.continuous.as_ref().expect("continuous model");
    let poles = cont.poles().unwrap();
    assert!(poles.iter().any(|p| p.norm() < 1e-6), "{poles:?}");
    let g = step_response(&model, 0.5, DT).unwrap();
    let fit = fit_polynomial(&g, 4, 0.5).unwrap();
    assert!((fit.slope() + 0.1).abs() < 1e-8, "slope {}", fit.slope());
}

#[test]
fn zero_input_is_insufficient_excitation() {
    let err = identify(&trace(vec![0.0; 300]), &trace(broadband(300)), 2).unwrap_err();
    assert!(matches!(err, SysIdError::InsufficientExcitation(_)));
    assert!(err.to_string().contains("insufficient excitation"));
}

#[test]
fn integrator_step_response_is_ramp() {
    let cont = ContinuousModel::new(dmatrix![0.0], dvector![1.0], dvector![-0.1], 0.0);
    let model = IdentifiedModel::from_continuous(cont, DT).unwrap();
    let g = step_response(&model, 1.0, DT).unwrap();
    for (k, v) in g.values().iter().enumerate() {
        assert!((v + g.time(k) / 10.0).abs() < 1e-12);
    }
}

#[test]
fn first_order_step_response_matches_closed_form() {
    let (h, d) = (4.0, 0.8);
    let cont = ContinuousModel::new(dmatrix![-d / (2.0 * h)], dvector![1.0], dvector![-1.0 / (2.0 * h)], 0.0);
    let model = IdentifiedModel::from_continuous(cont, DT).unwrap();
    // resampled at a different step through the continuous model
    for dt in [DT, 0.01] {
        let g = step_response(&model, 3.0, dt).unwrap();
        for (k, v) in g.values().iter().enumerate() {
            let t = g.time(k);
            let exact = -(1.0 - (-d * t / (2.0 * h)).exp()) / d;
            assert!((v - exact).abs() < 1e-8, "dt {dt} t {t}");
        }
    }
}

#[test]
fn step_response_point_count_and_feedthrough() {
    let cont = ContinuousModel::new(dmatrix![-1.0], dvector![1.0], dvector![1.0], 0.3);
    let model = IdentifiedModel::from_continuous(cont, 0.1).unwrap();
    for (horizon, dt) in [(1.0, 0.1), (1.05, 0.1), (0.5, 0.03)] {
        let g = step_response(&model, horizon, dt).unwrap();
        assert_eq!(g.len(), (horizon / dt - 1e-9f64).ceil() as usize + 1);
        assert!((g.values()[0] - 0.3).abs() < 1e-15);
    }
}

#[test]
fn continuous_transfer_function_coefficients() {
    let cont = ContinuousModel::new(dmatrix![0.0, 1.0; -2.0, -3.0], dvector![0.0, 1.0], dvector![4.0, 0.0], 0.0);
    // 4 / (s^2 + 3 s + 2)
    assert_eq!(cont.den, vec![1.0, 3.0, 2.0]);
    assert!((cont.num[0]).abs() < 1e-15 && (cont.num[1]).abs() < 1e-15);
    assert!((cont.num[2] - 4.0).abs() < 1e-12);
}

fn single_area(h: f64, d: f64, scale: f64) -> (SignalTrace, SignalTrace) {
    let p = step_input(600, 60, 0.1);
    let w = swing_response(h, d, &p);
    (trace(p.iter().map(|v| v * scale).collect()), trace(w))
}

#[test]
fn simulated_single_machine_without_damping() {
    let mut scen = fixtures::single_machine();
    let dist = scen.disturbance.clone().unwrap();
    let sim = simulate(&scen.grid, &dist, &scen.simulation).unwrap();
    let ds = extract_area_dataset(&sim, &scen.grid).unwrap();
    let timing = EventTiming { t_start: dist.t_start_s, t_clear: dist.t_start_s };
    let est = estimate(&ds, &SysIdConfig::default(), &timing);
    let h = est.h("A").unwrap();
    assert!((h - 5.0).abs() / 5.0 < 0.005, "H = {h}");

    scen.grid.generators[0].d_pu = 0.05;
    let sim = simulate(&scen.grid, &DisturbanceSpec::load_step(2, 0.1, 1.0), &scen.simulation).unwrap();
    let ds = extract_area_dataset(&sim, &scen.grid).unwrap();
    let h = estimate(&ds, &SysIdConfig::default(), &timing).h("A").unwrap();
    assert!((h - 5.0).abs() / 5.0 < 0.05, "H = {h}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_inertia_for_any_fit_settings(
        h in 1.75f64..10.0,
        poly_order in 1usize..=8,
        window in 0.2f64..2.0,
    ) {
        let (p, w) = single_area(h, 0.0, 1.0);
        let cfg = SysIdConfig { poly_order, fit_window_s: window, ..SysIdConfig::default() };
        let (res, _) = estimate_area(&p, &w, &cfg).unwrap();
        let got = res.h().unwrap();
        prop_assert!((got - h).abs() / h < 1e-6, "H {h} -> {got}");
    }

    #[test]
    fn input_scaling_is_equivariant(k in prop::sample::select(vec![0.01, 0.2, 3.0, 50.0])) {
        let cfg = SysIdConfig::default();
        let (p, w) = single_area(4.0, 0.05, 1.0);
        let (pk, _) = single_area(4.0, 0.05, k);
        let model = identify(&p, &w, 2).unwrap();
        let model_k = identify(&pk, &w, 2).unwrap();
        let g = step_response(&model, 0.5, DT).unwrap();
        let gk = step_response(&model_k, 0.5, DT).unwrap();
        for (a, b) in g.values().iter().zip(gk.values()) {
            prop_assert!((b * k - a).abs() <= 1e-3 * g.values()[30].abs());
        }
        let base = estimate_area(&p, &w, &cfg).unwrap().0.h().unwrap();
        // scaling both channels by k keeps the loop and hence H
        let wk = w.scaled(k).unwrap();
        let joint = estimate_area(&pk, &wk, &cfg).unwrap().0.h().unwrap();
        prop_assert!((joint - base).abs() / base < 1e-3);
    }
}
