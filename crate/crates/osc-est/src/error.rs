use inertia_signal::SignalError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OscError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("bandwidth must be positive and finite, got {0} Hz")]
    Bandwidth(f64),
    #[error("bandwidth {bandwidth_hz} Hz exceeds the Nyquist frequency {nyquist_hz} Hz")]
    AboveNyquist { bandwidth_hz: f64, nyquist_hz: f64 },
    #[error("bin spacing {df:.4} Hz leaves fewer than {need} bins below {bandwidth_hz} Hz")]
    TooCoarse { df: f64, bandwidth_hz: f64, need: usize },
    #[error("speed and power records are on different grids")]
    Mismatch,
}

pub type Result<T, E = OscError> = std::result::Result<T, E>;
