use inertia_core::SignalTrace;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, SignalError};

/// One-sided spectrum of a real record, coefficients scaled by `dt` so that
/// `X(f_k) ≈ dt · Σ x_n e^{-j2π f_k (t_n - t_0)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub coefficients: Vec<Complex64>,
    pub dt: f64,
    pub len: usize,
    pub t0: f64,
}

impl Spectrum {
    /// Bin spacing, `1 / (M dt)`.
    pub fn df(&self) -> f64 {
        1.0 / (self.len as f64 * self.dt)
    }

    /// `∫|x|² dt` recovered from the one-sided coefficients.
    pub fn energy(&self) -> f64 {
        let nyquist_bin = self.len % 2 == 0;
        let last = self.coefficients.len() - 1;
        let sum: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let w = if k == 0 || (nyquist_bin && k == last) { 1.0 } else { 2.0 };
                w * c.norm_sqr()
            })
            .sum();
        sum * self.df()
    }

    /// Indices of bins with `lo < f <= hi`.
    pub fn band(&self, lo: f64, hi: f64) -> impl Iterator<Item = usize> + '_ {
        let tol = 1e-9 * self.df();
        self.frequencies
            .iter()
            .enumerate()
            .filter(move |(_, &f)| f > lo + tol && f <= hi + tol)
            .map(|(k, _)| k)
    }
}

pub fn dft(trace: &SignalTrace) -> Result<Spectrum> {
    let m = trace.len();
    if m < 2 {
        return Err(SignalError::TooShort { len: m, need: 2 });
    }
    let dt = trace.dt();
    let mut buf: Vec<Complex64> = trace.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let n_bins = m / 2 + 1;
    let df = 1.0 / (m as f64 * dt);
    Ok(Spectrum {
        frequencies: (0..n_bins).map(|k| k as f64 * df).collect(),
        coefficients: buf[..n_bins].iter().map(|c| c * dt).collect(),
        dt,
        len: m,
        t0: trace.t0(),
    })
}

/// Inverse of [`dft`], rebuilding the two-sided spectrum by conjugate symmetry.
pub fn idft(spectrum: &Spectrum) -> Result<SignalTrace> {
    let m = spectrum.len;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, c) in spectrum.coefficients.iter().enumerate() {
        buf[k] = *c;
        if k > 0 && m - k != k {
            buf[m - k] = c.conj();
        }
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let scale = 1.0 / (m as f64 * spectrum.dt);
    let values = buf.iter().map(|c| c.re * scale).collect();
    Ok(SignalTrace::new(values, spectrum.dt, spectrum.t0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_count_and_spacing() {
        for m in [2, 7, 8, 601] {
            let t = SignalTrace::new(vec![1.0; m], 0.05, 0.0).unwrap();
            let s = dft(&t).unwrap();
            assert_eq!(s.coefficients.len(), m / 2 + 1);
            assert!((s.frequencies[1] - 1.0 / (m as f64 * 0.05)).abs() < 1e-12);
        }
    }

    #[test]
    fn band_selection_excludes_dc() {
        let t = SignalTrace::new(vec![0.0; 100], 0.01, 0.0).unwrap();
        let s = dft(&t).unwrap();
        let idx: Vec<usize> = s.band(0.0, 3.0).collect();
        assert_eq!(idx, vec![1, 2, 3]);
    }
}
