use inertia_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("structural network error: {0}")]
    Structural(String),
    #[error("equilibrium not found: {0}")]
    Equilibrium(String),
    #[error("unstable scenario: loss of synchronism at t = {t:.4} s (angle spread {spread:.3} rad)")]
    Unstable { t: f64, spread: f64 },
    #[error("no steady-state window: {0}")]
    MissingSteadyWindow(String),
    #[error("invalid simulation request: {0}")]
    Invalid(String),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
