use inertia_core::linalg;
use inertia_core::SignalTrace;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, SysIdError};

/// Singular values below this fraction of the largest are treated as
/// numerically zero when choosing the retained state dimension.
const ORDER_RTOL: f64 = 1e-10;
const RCOND: f64 = 1e-12;

/// Continuous-time equivalent of an identified model.
#[derive(Debug, Clone)]
pub struct ContinuousModel {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub d: f64,
    /// Denominator `s^n + a_{n-1} s^{n-1} + ... + a_0`, descending powers,
    /// leading coefficient 1.
    pub den: Vec<f64>,
    /// Numerator in descending powers, same length as `den`.
    pub num: Vec<f64>,
}

impl ContinuousModel {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>, d: f64) -> Self {
        let (den, adj) = linalg::faddeev_leverrier(&a);
        let mut num = vec![d];
        for (k, n_k) in adj.iter().enumerate() {
            num.push(c.dot(&(n_k * &b)) + d * den[k + 1]);
        }
        Self { a, b, c, d, den, num }
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        Ok(linalg::eig(&self.a)?.values)
    }
}

/// Discrete SISO state-space model `x+ = A x + B u`, `y = C x + D u`.
#[derive(Debug, Clone)]
pub struct IdentifiedModel {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub d: f64,
    pub dt: f64,
    /// Requested state dimension.
    pub requested_order: usize,
    /// Hankel (oblique projection) singular values, descending.
    pub singular_values: Vec<f64>,
    /// `100 (1 - |y - y_hat| / |y - mean(y)|)` over the identification record.
    pub fit_pct: f64,
    /// Some discrete eigenvalue lies outside the unit circle.
    pub unstable: bool,
    pub continuous: Option<ContinuousModel>,
    pub warnings: Vec<String>,
}

impl IdentifiedModel {
    /// Builds the discrete model by zero-order-hold sampling of a
    /// continuous one.
    pub fn from_continuous(cont: ContinuousModel, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(SysIdError::Invalid("dt must be positive".into()));
        }
        let n = cont.a.nrows();
        let b = DMatrix::from_column_slice(n, 1, cont.b.as_slice());
        let (ad, bd) = linalg::zoh_discretize(&cont.a, &b, dt);
        let mut model = Self {
            a: ad,
            b: bd.column(0).into_owned(),
            c: cont.c.clone(),
            d: cont.d,
            dt,
            requested_order: n,
            singular_values: Vec::new(),
            fit_pct: f64::NAN,
            unstable: false,
            continuous: Some(cont),
            warnings: Vec::new(),
        };
        model.unstable = model.spectral_radius()? > 1.0 + 1e-9;
        Ok(model)
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        Ok(linalg::eig(&self.a)?.values)
    }

    fn spectral_radius(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Output for input `u` starting from state `x0`.
    pub fn simulate(&self, u: &[f64], x0: &DVector<f64>) -> Vec<f64> {
        let mut x = x0.clone();
        u.iter()
            .map(|&uk| {
                let y = self.c.dot(&x) + self.d * uk;
                x = &self.a * &x + &self.b * uk;
                y
            })
            .collect()
    }

    fn to_continuous(&self) -> Result<ContinuousModel> {
        let log = linalg::logm(&self.a)?;
        let ac = linalg::real_part(&log, 1e-8)? / self.dt;
        let gamma = linalg::exp_integral(&ac, self.dt);
        let bc = gamma
            .lu()
            .solve(&self.b)
            .ok_or_else(|| SysIdError::NoContinuousModel("singular input integral".into()))?;
        Ok(ContinuousModel::new(ac, bc, self.c.clone(), self.d))
    }
}

/// Past/future block row count used for order `n`.
pub fn horizon_rows(n: usize) -> usize {
    (4 * n).max(10)
}

fn hankel(x: &[f64], start: usize, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |r, c| x[start + r + c])
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Deterministic subspace identification of a SISO model of order `order`.
///
/// Input and output are normalized to unit RMS, the future outputs are
/// obliquely projected along the future inputs onto the past data, and the
/// state sequence is taken from the `order` dominant singular directions
/// (fewer if the remaining singular values are numerically zero). `A, B, C,
/// D` then follow from one least-squares regression on that state sequence.
pub fn identify(input: &SignalTrace, output: &SignalTrace, order: usize) -> Result<IdentifiedModel> {
    identify_with(input, output, order, &IdentifyOptions::default())
}

/// Knobs of [`identify_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentifyOptions {
    /// Estimate `D`; otherwise the model is strictly proper and `C` is
    /// regressed on the states alone.
    pub feedthrough: bool,
    /// Relative singular-value cutoff of the pseudo-inverse in the oblique
    /// projection. Raising it discards directions of the past/future data
    /// that only noise excites.
    pub projection_rcond: f64,
}

impl Default for IdentifyOptions {
    fn default() -> Self {
        Self { feedthrough: true, projection_rcond: RCOND }
    }
}

/// As [`identify`] with explicit options.
pub fn identify_with(
    input: &SignalTrace,
    output: &SignalTrace,
    order: usize,
    opts: &IdentifyOptions,
) -> Result<IdentifiedModel> {
    if !(opts.projection_rcond >= 0.0 && opts.projection_rcond < 1.0) {
        return Err(SysIdError::Invalid(format!(
            "projection rcond must lie in [0, 1), got {}",
            opts.projection_rcond
        )));
    }
    if order == 0 {
        return Err(SysIdError::ZeroOrder);
    }
    if !input.same_grid(output) {
        return Err(SysIdError::Mismatch);
    }
    let i = horizon_rows(order);
    let len = input.len();
    let min_cols = 3 * i + order + 1;
    let need = 2 * i + min_cols - 1;
    if len < need {
        return Err(SysIdError::TooShort { len, need, horizon: i });
    }
    let su = rms(input.values());
    let sy = rms(output.values());
    if !(su > 0.0) {
        return Err(SysIdError::InsufficientExcitation("input is identically zero".into()));
    }
    if !(sy > 0.0) {
        return Err(SysIdError::InsufficientExcitation("output carries no response".into()));
    }
    let u: Vec<f64> = input.values().iter().map(|v| v / su).collect();
    let y: Vec<f64> = output.values().iter().map(|v| v / sy).collect();

    let j = len - 2 * i + 1;
    let up = hankel(&u, 0, i, j);
    let uf = hankel(&u, i, i, j);
    let yp = hankel(&y, 0, i, j);
    let yf = hankel(&y, i, i, j);
    let mut z = DMatrix::zeros(3 * i, j);
    z.rows_mut(0, i).copy_from(&up);
    z.rows_mut(i, i).copy_from(&yp);
    z.rows_mut(2 * i, i).copy_from(&uf);
    let l = &yf * linalg::pinv(&z, opts.projection_rcond);
    let o = l.columns(0, 2 * i) * z.rows(0, 2 * i);

    let svd = o.clone().svd(true, false);
    let (u_o, s) = (svd.u.expect("u requested"), svd.singular_values);
    let singular_values: Vec<f64> = s.iter().copied().collect();
    let s1 = singular_values[0];
    if !(s1 > 0.0) || !s1.is_finite() {
        return Err(SysIdError::InsufficientExcitation(
            "projected output has no energy".into(),
        ));
    }
    let n = singular_values.iter().take(order).filter(|&&v| v > ORDER_RTOL * s1).count();
    let mut warnings = Vec::new();
    if n < order {
        warnings.push(format!(
            "order reduced to {n}: remaining singular values below {ORDER_RTOL:e} of the largest"
        ));
    }
    // X = Gamma^+ O with Gamma = U1 S1^(1/2)
    let mut x = u_o.columns(0, n).transpose() * &o;
    for r in 0..n {
        let w = 1.0 / singular_values[r].sqrt();
        x.row_mut(r).scale_mut(w);
    }

    let cols = j - 1;
    let mut reg = DMatrix::zeros(n + 1, cols);
    let mut tgt = DMatrix::zeros(n + 1, cols);
    reg.rows_mut(0, n).copy_from(&x.columns(0, cols));
    tgt.rows_mut(0, n).copy_from(&x.columns(1, cols));
    for k in 0..cols {
        reg[(n, k)] = u[i + k];
        tgt[(n, k)] = y[i + k];
    }
    let theta = &tgt * linalg::pinv(&reg, RCOND);

    let a = theta.view((0, 0), (n, n)).into_owned();
    let b = theta.view((0, n), (n, 1)).column(0).into_owned() / su;
    let (c, d) = if opts.feedthrough {
        let c = theta.view((n, 0), (1, n)).transpose().column(0).into_owned() * sy;
        (c, theta[(n, n)] * sy / su)
    } else {
        let ct = tgt.rows(n, 1) * linalg::pinv(&reg.rows(0, n).into_owned(), RCOND);
        (ct.transpose().column(0).into_owned() * sy, 0.0)
    };

    let mut model = IdentifiedModel {
        a,
        b,
        c,
        d,
        dt: input.dt(),
        requested_order: order,
        singular_values,
        fit_pct: f64::NAN,
        unstable: false,
        continuous: None,
        warnings,
    };
    model.unstable = model.spectral_radius()? > 1.0 + 1e-9;
    if model.unstable {
        model.warnings.push("identified model is unstable".into());
    }
    model.fit_pct = fit_percent(&model, input.values(), output.values());
    match model.to_continuous() {
        Ok(cont) => model.continuous = Some(cont),
        Err(e) => model.warnings.push(format!("no continuous-time equivalent: {e}")),
    }
    Ok(model)
}

/// Output fit with the initial state chosen by least squares.
fn fit_percent(model: &IdentifiedModel, u: &[f64], y: &[f64]) -> f64 {
    let n = model.order();
    let zero_state = model.simulate(u, &DVector::zeros(n));
    let m = y.len();
    let mut obs = DMatrix::zeros(m, n);
    let mut row = model.c.transpose();
    for k in 0..m {
        obs.row_mut(k).copy_from(&row);
        row = &row * &model.a;
    }
    if obs.iter().chain(&zero_state).any(|v| !v.is_finite()) {
        return f64::NEG_INFINITY;
    }
    let resid0 = DMatrix::from_iterator(m, 1, y.iter().zip(&zero_state).map(|(a, b)| a - b));
    let x0 = linalg::lstsq(&obs, &resid0, RCOND);
    let x0 = x0.column(0).into_owned();
    let yhat = model.simulate(u, &x0);
    let mean = y.iter().sum::<f64>() / m as f64;
    let err: f64 = y.iter().zip(&yhat).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let spread: f64 = y.iter().map(|a| (a - mean).powi(2)).sum::<f64>().sqrt();
    if spread > 0.0 {
        100.0 * (1.0 - err / spread)
    } else {
        f64::NAN
    }
}

/// Discrete eigenvalues as `[re, im]` pairs, for diagnostics.
pub(crate) fn eigen_list(model: &IdentifiedModel) -> Vec<[f64; 2]> {
    model
        .eigenvalues()
        .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
        .unwrap_or_default()
}
