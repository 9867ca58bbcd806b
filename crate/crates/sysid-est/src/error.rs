use inertia_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SysIdError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("insufficient excitation: {0}")]
    InsufficientExcitation(String),
    #[error("input and output traces differ in length or sampling")]
    Mismatch,
    #[error("record too short: {len} samples, need at least {need} for horizon {horizon}")]
    TooShort { len: usize, need: usize, horizon: usize },
    #[error("model order must be at least 1")]
    ZeroOrder,
    #[error("underdetermined polynomial fit: {samples} samples for order {order}")]
    Underdetermined { samples: usize, order: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("no continuous-time model available: {0}")]
    NoContinuousModel(String),
}

pub type Result<T, E = SysIdError> = std::result::Result<T, E>;
