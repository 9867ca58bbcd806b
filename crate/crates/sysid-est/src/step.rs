use inertia_core::{linalg, SignalTrace};
use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SysIdError};
use crate::n4sid::IdentifiedModel;

/// Unit-step response sampled at `dt` over `[0, horizon_s]`,
/// `ceil(horizon_s / dt) + 1` points. `g(0)` equals the feedthrough term.
///
/// Uses the discrete model directly when `dt` matches its sampling;
/// otherwise the continuous equivalent is re-sampled at `dt`.
pub fn step_response(model: &IdentifiedModel, horizon_s: f64, dt: f64) -> Result<SignalTrace> {
    if !(horizon_s > 0.0 && horizon_s.is_finite()) {
        return Err(SysIdError::Invalid("horizon must be positive".into()));
    }
    if !(dt > 0.0) {
        return Err(SysIdError::Invalid("dt must be positive".into()));
    }
    let points = (horizon_s / dt - 1e-9).ceil() as usize + 1;
    let (a, b) = if (dt - model.dt).abs() <= 1e-12 * model.dt {
        (model.a.clone(), model.b.clone())
    } else {
        let cont = model.continuous.as_ref().ok_or_else(|| {
            SysIdError::NoContinuousModel("cannot resample the discrete model".into())
        })?;
        let n = cont.a.nrows();
        let bm = DMatrix::from_column_slice(n, 1, cont.b.as_slice());
        let (ad, bd) = linalg::zoh_discretize(&cont.a, &bm, dt);
        (ad, bd.column(0).into_owned())
    };
    let mut x = DVector::zeros(a.nrows());
    let mut g = Vec::with_capacity(points);
    for _ in 0..points {
        g.push(model.c.dot(&x) + model.d);
        x = &a * &x + &b;
    }
    Ok(SignalTrace::new(g, dt, 0.0)?)
}
