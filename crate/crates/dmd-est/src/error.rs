use inertia_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DmdError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("need at least {need} snapshots, got {got}")]
    TooFewSnapshots { need: usize, got: usize },
    #[error("snapshot matrix has no energy")]
    ZeroData,
    #[error("start index {index} outside 0..{len}")]
    StartIndex { index: usize, len: usize },
    #[error("amplitudes have not been computed")]
    NoAmplitudes,
    #[error("snapshot dimension {got} does not match the model ({expected})")]
    Dimension { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T, E = DmdError> = std::result::Result<T, E>;
