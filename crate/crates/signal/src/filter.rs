use std::f64::consts::PI;

use inertia_core::{FilterSpec, SignalTrace};
use num_complex::Complex64;

use crate::error::{Result, SignalError};

/// One second-order (or first-order when `b[2] == a[2] == 0`) section,
/// `H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    /// Frequency response at normalized angular frequency `w` (rad/sample).
    pub fn response(&self, w: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -w);
        let z2 = z1 * z1;
        (self.b[0] + self.b[1] * z1 + self.b[2] * z2) / (1.0 + self.a[0] * z1 + self.a[1] * z2)
    }

    fn run(&self, x: &mut [f64]) {
        let Some(&x0) = x.first() else { return };
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        // steady state for a constant input equal to the first sample
        let mut z2 = (b2 - a2) * x0;
        let mut z1 = (b1 - a1) * x0 + z2;
        for v in x.iter_mut() {
            let xin = *v;
            let y = b0 * xin + z1;
            z1 = b1 * xin - a1 * y + z2;
            z2 = b2 * xin - a2 * y;
            *v = y;
        }
    }
}

/// Digital Butterworth low-pass via the bilinear transform with frequency
/// prewarping. Each section is normalized to unit DC gain.
pub fn butterworth_sos(order: usize, cutoff_hz: f64, dt: f64) -> Result<Vec<Biquad>> {
    if order == 0 {
        return Err(SignalError::ZeroOrder);
    }
    let fs = 1.0 / dt;
    let nyquist_hz = fs / 2.0;
    if !(cutoff_hz > 0.0 && cutoff_hz < nyquist_hz) {
        return Err(SignalError::CutoffAboveNyquist { cutoff_hz, nyquist_hz });
    }
    let k = 2.0 * fs;
    let wc = k * (PI * cutoff_hz / fs).tan();
    let digital_pole = |m: usize| {
        let theta = PI * (2 * m + order + 1) as f64 / (2 * order) as f64;
        let s = wc * Complex64::from_polar(1.0, theta);
        (k + s) / (k - s)
    };

    let mut sections = Vec::with_capacity(order.div_ceil(2));
    for m in 0..order / 2 {
        let p = digital_pole(m);
        let a1 = -2.0 * p.re;
        let a2 = p.norm_sqr();
        let g = (1.0 + a1 + a2) / 4.0;
        sections.push(Biquad { b: [g, 2.0 * g, g], a: [a1, a2] });
    }
    if order % 2 == 1 {
        let p = digital_pole(order / 2).re;
        let g = (1.0 - p) / 2.0;
        sections.push(Biquad { b: [g, g, 0.0], a: [-p, 0.0] });
    }
    Ok(sections)
}

/// Number of samples padded on each side: `order` cutoff periods.
fn pad_len(spec: &FilterSpec, dt: f64, len: usize) -> usize {
    let n = (spec.order as f64 / (spec.cutoff_hz * dt)).ceil() as usize;
    n.min(len.saturating_sub(1))
}

/// Zero-phase (forward-backward) Butterworth low-pass. The record is
/// extended by point reflection at both ends before filtering and each
/// pass starts from the steady state of its first sample.
pub fn lowpass(trace: &SignalTrace, spec: &FilterSpec) -> Result<SignalTrace> {
    let dt = trace.dt();
    let sos = butterworth_sos(spec.order, spec.cutoff_hz, dt)?;
    let x = trace.values();
    let m = x.len();
    let pad = pad_len(spec, dt, m);

    let mut buf = Vec::with_capacity(m + 2 * pad);
    buf.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    buf.extend_from_slice(x);
    buf.extend((1..=pad).map(|i| 2.0 * x[m - 1] - x[m - 1 - i]));

    for s in &sos {
        s.run(&mut buf);
    }
    buf.reverse();
    for s in &sos {
        s.run(&mut buf);
    }
    buf.reverse();
    Ok(trace.with_values(buf[pad..pad + m].to_vec())?)
}
