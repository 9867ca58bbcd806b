use inertia_core::SignalTrace;

use crate::error::{Result, SignalError};

/// Time derivative by central differences in the interior and one-sided
/// stencils at the ends (third order for M >= 4, second order for M = 3).
/// Units of the result are input units per second.
pub fn finite_diff(trace: &SignalTrace) -> Result<SignalTrace> {
    let x = trace.values();
    let m = x.len();
    if m < 3 {
        return Err(SignalError::TooShort { len: m, need: 3 });
    }
    let h = trace.dt();
    let mut d = vec![0.0; m];
    for k in 1..m - 1 {
        d[k] = (x[k + 1] - x[k - 1]) / (2.0 * h);
    }
    if m >= 4 {
        d[0] = (-11.0 * x[0] + 18.0 * x[1] - 9.0 * x[2] + 2.0 * x[3]) / (6.0 * h);
        d[m - 1] =
            (11.0 * x[m - 1] - 18.0 * x[m - 2] + 9.0 * x[m - 3] - 2.0 * x[m - 4]) / (6.0 * h);
    } else {
        d[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h);
        d[2] = (3.0 * x[2] - 4.0 * x[1] + x[0]) / (2.0 * h);
    }
    Ok(trace.with_values(d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ramp_gives_constant_slope() {
        for n in [3, 4, 50] {
            let t = SignalTrace::from_fn(n, 0.02, 1.0, |t| 3.0 - 0.7 * t).unwrap();
            let d = finite_diff(&t).unwrap();
            assert!(d.values().iter().all(|v| (v + 0.7).abs() < 1e-10), "{n}: {:?}", d.values());
        }
    }

    #[test]
    fn constant_gives_zero() {
        let t = SignalTrace::new(vec![4.2; 20], 0.1, 0.0).unwrap();
        assert!(finite_diff(&t).unwrap().values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn sinusoid_error_within_taylor_bound() {
        let (f, dt) = (1.3, 1.0 / 60.0);
        let w = 2.0 * PI * f;
        let t = SignalTrace::from_fn(600, dt, 0.0, |t| (w * t).sin()).unwrap();
        let d = finite_diff(&t).unwrap();
        let bound = (w * dt).powi(2) / 6.0;
        for (k, v) in d.values().iter().enumerate() {
            let exact = w * (w * t.time(k)).cos();
            assert!((v - exact).abs() / w <= bound, "k={k}");
        }
    }

    #[test]
    fn too_short_rejected() {
        let t = SignalTrace::new(vec![1.0, 2.0], 0.1, 0.0).unwrap();
        assert!(finite_diff(&t).is_err());
    }
}
