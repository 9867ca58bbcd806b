//! Small dense linear-algebra helpers shared by the estimators.
//!
//! nalgebra supplies the factorizations (SVD, real Schur, LU, Padé
//! exponential); what lives here are the pieces it does not expose directly:
//! minimum-norm least squares with an explicit rank cut, eigenvectors of a
//! general real matrix, and the principal matrix logarithm.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{CoreError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative singular-value cut used by [`pinv`] when none is given.
pub const DEFAULT_RCOND: f64 = 1e-12;

/// Moore-Penrose pseudo-inverse; singular values below `rcond * s_max` are
/// treated as zero.
pub fn pinv(a: &DMatrix<f64>, rcond: f64) -> DMatrix<f64> {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return DMatrix::zeros(c, r);
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.max();
    let cut = rcond * smax;
    let mut out = DMatrix::zeros(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cut && s > 0.0 {
            out += (vt.row(k).transpose() / s) * u.column(k).transpose();
        }
    }
    out
}

/// Minimum-norm least-squares solution of `a * x = b` (columns of `b` solved
/// independently).
pub fn lstsq(a: &DMatrix<f64>, b: &DMatrix<f64>, rcond: f64) -> DMatrix<f64> {
    pinv(a, rcond) * b
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// 2-norm condition number (infinite when rank deficient).
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

pub fn complex_condition_number(a: &CMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return f64::INFINITY;
    }
    let s = a.clone().singular_values();
    let hi = s.max();
    let lo = s.min();
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// Minimum-norm complex least squares, returning the solution together with
/// the 2-norm condition number of `a`.
pub fn complex_lstsq(a: &CMatrix, b: &CVector, rcond: f64) -> (CVector, f64) {
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let s = &svd.singular_values;
    let smax = s.max();
    let smin = s.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let mut x = CVector::zeros(a.ncols());
    for k in 0..s.len() {
        if s[k] > rcond * smax && s[k] > 0.0 {
            let coeff = u.column(k).dotc(b) / Complex64::new(s[k], 0.0);
            // row k of V^H, conjugated, is column k of V
            for j in 0..x.len() {
                x[j] += vt[(k, j)].conj() * coeff;
            }
        }
    }
    (x, cond)
}

pub fn to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|v| Complex64::new(v, 0.0))
}

/// Eigen-decomposition of a general real square matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    /// Column `k` is the unit-norm eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

/// Eigenvalues and eigenvectors of a real square matrix.
///
/// Eigenvalues come from the real Schur form. Complex eigenvalues are
/// returned as exact conjugate pairs (upper half-plane member first) with
/// conjugate eigenvectors; real eigenvalues get real eigenvectors.
/// Eigenvectors are found by shifted inverse iteration, so defective
/// matrices yield (nearly) parallel vectors for the repeated eigenvalue.
pub fn eig(a: &DMatrix<f64>) -> Result<Eigen> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(CoreError::Linalg("eig needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(Eigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::Linalg("matrix has non-finite entries".into()));
    }
    let raw: Vec<Complex64> = a
        .clone()
        .schur()
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let real_tol = 1e-12 * scale;

    let mut used = vec![false; raw.len()];
    let mut values = Vec::with_capacity(n);
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mu = raw[i];
        if mu.im.abs() <= real_tol {
            values.push(Complex64::new(mu.re, 0.0));
            continue;
        }
        // pair with the closest unused eigenvalue to the conjugate
        let target = mu.conj();
        let partner = (0..raw.len())
            .filter(|&j| !used[j])
            .min_by(|&x, &y| (raw[x] - target).norm().total_cmp(&(raw[y] - target).norm()));
        let upper = if mu.im > 0.0 { mu } else { mu.conj() };
        let upper = match partner {
            Some(j) => {
                used[j] = true;
                // average the pair so the two members are exact conjugates
                let other = if raw[j].im > 0.0 { raw[j] } else { raw[j].conj() };
                (upper + other) * 0.5
            }
            None => upper,
        };
        values.push(upper);
        values.push(upper.conj());
    }

    let mut vectors = CMatrix::zeros(n, n);
    let mut k = 0;
    while k < values.len() {
        let mu = values[k];
        let v = inverse_iteration(a, mu, scale)?;
        if mu.im != 0.0 && k + 1 < values.len() && values[k + 1] == mu.conj() {
            vectors.set_column(k, &v);
            vectors.set_column(k + 1, &v.map(|z| z.conj()));
            k += 2;
        } else {
            let v = if mu.im == 0.0 { v.map(|z| Complex64::new(z.re, 0.0)) } else { v };
            let nrm = v.norm();
            let v = if nrm > 0.0 { v / Complex64::new(nrm, 0.0) } else { v };
            vectors.set_column(k, &v);
            k += 1;
        }
    }
    Ok(Eigen { values, vectors })
}

fn inverse_iteration(a: &DMatrix<f64>, mu: Complex64, scale: f64) -> Result<CVector> {
    let n = a.nrows();
    let shift = mu + Complex64::new(1e-10 * scale, 0.0);
    let mut m = to_complex(a);
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    let lu = m.lu();
    let mut v = CVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.1 * i as f64, 0.01 * (i % 3) as f64));
    for _ in 0..4 {
        let w = match lu.solve(&v) {
            Some(w) => w,
            None => {
                // exactly singular shifted matrix: the null vector is what we want
                return null_vector(a, mu);
            }
        };
        let nrm = w.norm();
        if !(nrm.is_finite() && nrm > 0.0) {
            return null_vector(a, mu);
        }
        v = w / Complex64::new(nrm, 0.0);
    }
    Ok(normalize_phase(v))
}

fn null_vector(a: &DMatrix<f64>, mu: Complex64) -> Result<CVector> {
    let n = a.nrows();
    let mut m = to_complex(a);
    for i in 0..n {
        m[(i, i)] -= mu;
    }
    let svd = m.svd(false, true);
    let vt = svd
        .v_t
        .ok_or_else(|| CoreError::Linalg("SVD failed".into()))?;
    let s = &svd.singular_values;
    let (kmin, _) = s
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .ok_or_else(|| CoreError::Linalg("empty SVD".into()))?;
    let v = CVector::from_fn(n, |j, _| vt[(kmin, j)].conj());
    Ok(normalize_phase(v))
}

/// Unit norm, largest-magnitude component real and positive.
fn normalize_phase(v: CVector) -> CVector {
    let nrm = v.norm();
    if nrm == 0.0 {
        return v;
    }
    let pivot = v
        .iter()
        .copied()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot / Complex64::new(pivot.norm(), 0.0);
    v / (phase * Complex64::new(nrm, 0.0))
}

/// Principal logarithm of a diagonalizable real matrix via its
/// eigen-decomposition. Fails on zero or near-defective spectra.
pub fn logm(a: &DMatrix<f64>) -> Result<CMatrix> {
    let e = eig(a)?;
    let scale = a.norm().max(f64::MIN_POSITIVE);
    if let Some(mu) = e.values.iter().find(|mu| mu.norm() <= 1e-14 * scale) {
        return Err(CoreError::Linalg(format!("logarithm of zero eigenvalue {mu}")));
    }
    let cond = complex_condition_number(&e.vectors);
    if !(cond < 1e10) {
        return Err(CoreError::Linalg(format!(
            "eigenvector matrix is near-singular (condition {cond:.3e}); matrix may be defective"
        )));
    }
    let vinv = e
        .vectors
        .clone()
        .try_inverse()
        .ok_or_else(|| CoreError::Linalg("eigenvector matrix not invertible".into()))?;
    let logs = CVector::from_iterator(e.values.len(), e.values.iter().map(|mu| mu.ln()));
    Ok(&e.vectors * CMatrix::from_diagonal(&logs) * vinv)
}

/// Real part of a complex matrix, failing if the imaginary part is not
/// negligible relative to the real part.
pub fn real_part(a: &CMatrix, rtol: f64) -> Result<DMatrix<f64>> {
    let re = a.map(|z| z.re);
    let im = a.map(|z| z.im);
    let scale = re.norm().max(f64::MIN_POSITIVE);
    if im.norm() > rtol * scale {
        return Err(CoreError::Linalg(format!(
            "result has a non-negligible imaginary part ({:.3e} relative)",
            im.norm() / scale
        )));
    }
    Ok(re)
}

/// Zero-order-hold discretization of `(a, b)` at step `dt`, via the
/// exponential of the augmented matrix `[[a, b], [0, 0]]`.
pub fn zoh_discretize(a: &DMatrix<f64>, b: &DMatrix<f64>, dt: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let m = b.ncols();
    let mut aug = DMatrix::zeros(n + m, n + m);
    aug.view_mut((0, 0), (n, n)).copy_from(&(a * dt));
    aug.view_mut((0, n), (n, m)).copy_from(&(b * dt));
    let e = aug.exp();
    (
        e.view((0, 0), (n, n)).into_owned(),
        e.view((0, n), (n, m)).into_owned(),
    )
}

/// `integral_0^dt exp(a s) ds`, via the augmented exponential.
pub fn exp_integral(a: &DMatrix<f64>, dt: f64) -> DMatrix<f64> {
    let n = a.nrows();
    zoh_discretize(a, &DMatrix::identity(n, n), dt).1
}

/// Characteristic polynomial coefficients `[1, p1, ..., pn]` (descending
/// powers) and the adjugate coefficient matrices from Faddeev-LeVerrier:
/// `adj(sI - a) = sum_k N_k s^(n-1-k)`.
pub fn faddeev_leverrier(a: &DMatrix<f64>) -> (Vec<f64>, Vec<DMatrix<f64>>) {
    let n = a.nrows();
    let mut coeffs = vec![1.0];
    let mut adj = Vec::with_capacity(n);
    let mut m = DMatrix::identity(n, n);
    for k in 1..=n {
        adj.push(m.clone());
        let am = a * &m;
        let c = -am.trace() / k as f64;
        coeffs.push(c);
        m = am + DMatrix::identity(n, n) * c;
    }
    (coeffs, adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_eig_pairs(a: &DMatrix<f64>) {
        let e = eig(a).unwrap();
        let ac = to_complex(a);
        for (k, mu) in e.values.iter().enumerate() {
            let v = e.vectors.column(k).into_owned();
            let r = &ac * &v - &v * *mu;
            assert!(r.norm() < 1e-9 * a.norm().max(1.0), "residual {} for {mu}", r.norm());
        }
    }

    #[test]
    fn eig_of_rotation_is_conjugate_pair() {
        let th: f64 = 0.3;
        let a = DMatrix::from_row_slice(2, 2, &[0.9 * th.cos(), -0.9 * th.sin(), 0.9 * th.sin(), 0.9 * th.cos()]);
        let e = eig(&a).unwrap();
        assert_eq!(e.values[0], e.values[1].conj());
        assert!(e.values[0].im > 0.0);
        assert!((e.values[0] - Complex64::from_polar(0.9, th)).norm() < 1e-14);
        assert_eig_pairs(&a);
    }

    #[test]
    fn eig_of_mixed_spectrum() {
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[0.5, 1.0, 0.0, 0.2, -1.0, 0.4, 0.3, 0.0, 0.0, 0.1, 0.9, 0.0, 0.2, 0.0, 0.0, -0.3],
        );
        assert_eig_pairs(&a);
    }

    #[test]
    fn logm_inverts_exp() {
        let a = DMatrix::from_row_slice(2, 2, &[-0.1, 2.0, -2.0, -0.3]);
        let e = (a.clone() * 0.05).exp();
        let l = real_part(&logm(&e).unwrap(), 1e-9).unwrap() / 0.05;
        assert!((l - a).norm() < 1e-10);
    }

    #[test]
    fn logm_rejects_zero_eigenvalue() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(logm(&a).is_err());
    }

    #[test]
    fn pinv_handles_rank_deficiency() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let p = pinv(&a, DEFAULT_RCOND);
        // A A+ A = A
        assert!((&a * &p * &a - &a).norm() < 1e-12);
    }

    #[test]
    fn zoh_of_integrator() {
        let a = DMatrix::zeros(1, 1);
        let b = DMatrix::from_element(1, 1, 2.0);
        let (ad, bd) = zoh_discretize(&a, &b, 0.1);
        assert!((ad[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((bd[(0, 0)] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn faddeev_leverrier_companion() {
        // s^2 + 3 s + 2
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -3.0]);
        let (c, adj) = faddeev_leverrier(&a);
        assert!((c[1] - 3.0).abs() < 1e-14 && (c[2] - 2.0).abs() < 1e-14);
        assert_eq!(adj.len(), 2);
    }

    #[test]
    fn complex_lstsq_square() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(3.0, 0.0), Complex64::new(1.0, -1.0)],
        );
        let x = CVector::from_vec(vec![Complex64::new(0.5, -0.2), Complex64::new(-1.0, 0.3)]);
        let b = &a * &x;
        let (xs, cond) = complex_lstsq(&a, &b, DEFAULT_RCOND);
        assert!((xs - x).norm() < 1e-12);
        assert!(cond.is_finite());
    }
}
