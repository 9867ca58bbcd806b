use inertia_core::linalg::{self, CMatrix, CVector};
use inertia_core::AreaDataset;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{DmdError, Result};

/// Discrete eigenvalues with modulus below this are dropped.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-12;
/// Singular values below this fraction of the largest count as zero when
/// deciding the usable rank.
const RANK_RTOL: f64 = 1e-10;
const AMPLITUDE_COND_WARN: f64 = 1e12;

/// Stacks speeds (area order) above powers (same order): `2 N_a x M`.
pub fn build_snapshots(dataset: &AreaDataset) -> DMatrix<f64> {
    let n = dataset.n_areas();
    let m = dataset.len();
    DMatrix::from_fn(2 * n, m, |r, c| {
        if r < n {
            dataset.speed(r).values()[c]
        } else {
            dataset.power(r - n).values()[c]
        }
    })
}

/// Exact DMD of a snapshot sequence.
#[derive(Debug, Clone)]
pub struct DmdModel {
    /// Continuous eigenvalues `ln(mu) / dt`, 1/s.
    pub eigenvalues: Vec<Complex64>,
    /// Discrete eigenvalues `mu`.
    pub discrete: Vec<Complex64>,
    /// Mode columns; rows follow the snapshot layout.
    pub modes: CMatrix,
    pub rank: usize,
    pub dt: f64,
    /// Singular values of the first snapshot block, descending.
    pub singular_values: Vec<f64>,
    pub amplitudes: Option<CVector>,
    pub start_index: Option<usize>,
    /// Condition number of the mode matrix in the amplitude solve.
    pub amplitude_cond: Option<f64>,
    /// `|Phi b - x_s| / |x_s|` at the start snapshot.
    pub amplitude_residual: Option<f64>,
    pub warnings: Vec<String>,
}

/// Real reconstruction plus the discarded imaginary residue
/// (`|Im| / |Re|` over all requested times).
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub values: DMatrix<f64>,
    pub imag_residue: f64,
}

/// Exact DMD: `Atilde = U^T X2 V S^-1`, modes `Phi = X2 V S^-1 W`,
/// continuous eigenvalues from the principal logarithm. `rank = None`
/// keeps every numerically nonzero singular direction; a requested rank
/// above that is reduced with a warning.
pub fn fit(x: &DMatrix<f64>, dt: f64, rank: Option<usize>) -> Result<DmdModel> {
    if !(dt > 0.0) {
        return Err(DmdError::Invalid("dt must be positive".into()));
    }
    let m = x.ncols();
    let need = rank.unwrap_or(1).max(1) + 1;
    if m < need {
        return Err(DmdError::TooFewSnapshots { need, got: m });
    }
    if rank == Some(0) {
        return Err(DmdError::Invalid("rank must be at least 1".into()));
    }
    let x1 = x.columns(0, m - 1).into_owned();
    let x2 = x.columns(1, m - 1).into_owned();

    let svd = x1.svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let s1 = singular_values.first().copied().unwrap_or(0.0);
    if !(s1 > 0.0) {
        return Err(DmdError::ZeroData);
    }
    let numerical = singular_values.iter().filter(|&&s| s > RANK_RTOL * s1).count();
    let mut warnings = Vec::new();
    let r = match rank {
        Some(r) if r > numerical => {
            warnings.push(format!("rank {r} reduced to numerical rank {numerical}"));
            numerical
        }
        Some(r) => r,
        None => numerical,
    };

    let ur = DMatrix::from_fn(x.nrows(), r, |i, j| u[(i, order[j])]);
    let vr = DMatrix::from_fn(m - 1, r, |i, j| vt[(order[j], i)]);
    let sinv = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        r,
        singular_values[..r].iter().map(|s| 1.0 / s),
    ));
    let x2_v_sinv = &x2 * &vr * &sinv;
    let atilde = ur.transpose() * &x2_v_sinv;
    let eig = linalg::eig(&atilde)?;
    let full_modes = linalg::to_complex(&x2_v_sinv) * &eig.vectors;

    let mut keep = Vec::with_capacity(r);
    for (k, mu) in eig.values.iter().enumerate() {
        if mu.norm() < ZERO_EIGENVALUE_TOL {
            warnings.push(format!("mode {k} dropped: log of zero (|mu| = {:.3e})", mu.norm()));
            continue;
        }
        if mu.im == 0.0 && mu.re < 0.0 {
            warnings.push(format!(
                "mode {k} on the negative real axis (mu = {:.6e}); principal logarithm used",
                mu.re
            ));
        }
        keep.push(k);
    }
    let discrete: Vec<Complex64> = keep.iter().map(|&k| eig.values[k]).collect();
    let eigenvalues = discrete.iter().map(|mu| mu.ln() / dt).collect();
    let modes = CMatrix::from_fn(x.nrows(), keep.len(), |i, j| full_modes[(i, keep[j])]);
    Ok(DmdModel {
        eigenvalues,
        discrete,
        modes,
        rank: r,
        dt,
        singular_values,
        amplitudes: None,
        start_index: None,
        amplitude_cond: None,
        amplitude_residual: None,
        warnings,
    })
}

impl DmdModel {
    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Least-squares amplitudes reproducing snapshot `start_index` of `x`;
    /// the reconstruction clock `t = 0` is that snapshot.
    pub fn compute_amplitudes(&mut self, x: &DMatrix<f64>, start_index: usize) -> Result<&CVector> {
        if x.nrows() != self.modes.nrows() {
            return Err(DmdError::Dimension {
                expected: self.modes.nrows(),
                got: x.nrows(),
            });
        }
        if start_index >= x.ncols() {
            return Err(DmdError::StartIndex {
                index: start_index,
                len: x.ncols(),
            });
        }
        let xs = x.column(start_index).map(|v| Complex64::new(v, 0.0));
        let (b, cond) = linalg::complex_lstsq(&self.modes, &xs, linalg::DEFAULT_RCOND);
        if cond > AMPLITUDE_COND_WARN {
            self.warnings.push(format!(
                "mode matrix ill-conditioned in amplitude solve (condition {cond:.3e}); minimum-norm amplitudes"
            ));
        }
        let resid = (&self.modes * &b - &xs).norm();
        let scale = xs.norm();
        self.amplitude_residual = Some(if scale > 0.0 { resid / scale } else { resid });
        self.amplitude_cond = Some(cond);
        self.start_index = Some(start_index);
        self.amplitudes = Some(b);
        Ok(self.amplitudes.as_ref().expect("just set"))
    }

    /// `sum_k exp(lambda_k t) b_k phi_k` at each of `times` (seconds from
    /// the start snapshot).
    pub fn reconstruct(&self, times: &[f64]) -> Result<Reconstruction> {
        let b = self.amplitudes.as_ref().ok_or(DmdError::NoAmplitudes)?;
        let rows = self.modes.nrows();
        let mut re = DMatrix::zeros(rows, times.len());
        let mut im_sq = 0.0;
        for (c, &t) in times.iter().enumerate() {
            let weights = CVector::from_iterator(
                b.len(),
                self.eigenvalues.iter().zip(b.iter()).map(|(l, bk)| (l * t).exp() * bk),
            );
            let v = &self.modes * weights;
            for r in 0..rows {
                re[(r, c)] = v[r].re;
                im_sq += v[r].im * v[r].im;
            }
        }
        let re_norm = re.norm();
        let imag_residue = if re_norm > 0.0 { im_sq.sqrt() / re_norm } else { im_sq.sqrt() };
        Ok(Reconstruction { values: re, imag_residue })
    }
}
