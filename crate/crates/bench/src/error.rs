use inertia_core::CoreError;
use inertia_osc::OscError;
use inertia_signal::SignalError;
use inertia_simkit::SimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("scenario `{scenario}`: {source}")]
    Simulation {
        scenario: String,
        #[source]
        source: SimError,
    },
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Osc(#[from] OscError),
    #[error("no area of the estimate has a ground-truth inertia")]
    NoCommonAreas,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Process exit code: 1 configuration, 2 simulation.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Simulation { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
