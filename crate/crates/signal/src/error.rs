use inertia_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cutoff {cutoff_hz} Hz must lie strictly between 0 and the Nyquist frequency {nyquist_hz} Hz")]
    CutoffAboveNyquist { cutoff_hz: f64, nyquist_hz: f64 },
    #[error("filter order must be at least 1")]
    ZeroOrder,
    #[error("trace too short: {len} samples, need {need}")]
    TooShort { len: usize, need: usize },
    #[error("invalid noise spec: {0}")]
    Noise(String),
}

pub type Result<T, E = SignalError> = std::result::Result<T, E>;
