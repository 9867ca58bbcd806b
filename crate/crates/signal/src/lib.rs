//! Measurement-channel emulation and conditioning shared by the estimators.

mod condition;
mod diff;
mod error;
mod filter;
mod noise;
mod spectrum;

pub use condition::{condition, trace_seed};
pub use diff::finite_diff;
pub use error::{Result, SignalError};
pub use filter::{butterworth_sos, lowpass, Biquad};
pub use noise::add_noise;
pub use spectrum::{dft, idft, Spectrum};
