use inertia_core::{linalg, SignalTrace};
use nalgebra::DMatrix;

use crate::error::{Result, SysIdError};

/// Least-squares polynomial `g(t) ≈ sum_k c_k t^k` over `[0, window_s]`,
/// with `t` measured from the start of the trace.
#[derive(Debug, Clone)]
pub struct PolynomialFit {
    pub order: usize,
    /// `c_0 ..= c_order` in the unscaled monomial basis.
    pub coefficients: Vec<f64>,
    pub window_s: f64,
    pub samples: usize,
    pub residual_rms: f64,
}

impl PolynomialFit {
    pub fn slope(&self) -> f64 {
        self.coefficients[1]
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

/// Fits an order-`order` polynomial to the first `window_s` seconds of `g`.
/// The regression runs on `t / window_s` for conditioning and the
/// coefficients are mapped back to the unscaled basis.
pub fn fit_polynomial(g: &SignalTrace, order: usize, window_s: f64) -> Result<PolynomialFit> {
    if order == 0 {
        return Err(SysIdError::Invalid("polynomial order must be at least 1".into()));
    }
    if !(window_s > 0.0 && window_s.is_finite()) {
        return Err(SysIdError::Invalid("fit window must be positive".into()));
    }
    let dt = g.dt();
    let horizon = (g.len() - 1) as f64 * dt;
    if window_s > horizon + 1e-9 * dt {
        return Err(SysIdError::Invalid(format!(
            "fit window {window_s} s exceeds the {horizon} s response"
        )));
    }
    let samples = ((window_s / dt) + 1e-9).floor() as usize + 1;
    if samples < order + 1 {
        return Err(SysIdError::Underdetermined { samples, order });
    }
    let vander = DMatrix::from_fn(samples, order + 1, |k, p| {
        ((k as f64 * dt) / window_s).powi(p as i32)
    });
    let rhs = DMatrix::from_column_slice(samples, 1, &g.values()[..samples]);
    let beta = linalg::lstsq(&vander, &rhs, 1e-14);
    let coefficients: Vec<f64> = (0..=order).map(|p| beta[(p, 0)] / window_s.powi(p as i32)).collect();
    let fitted = &vander * &beta;
    let residual_rms = ((fitted - rhs).norm_squared() / samples as f64).sqrt();
    Ok(PolynomialFit {
        order,
        coefficients,
        window_s,
        samples,
        residual_rms,
    })
}
