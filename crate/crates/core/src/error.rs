use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid signal trace: {0}")]
    InvalidTrace(String),
    #[error("invalid area dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid grid model: {0}")]
    InvalidModel(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("unsupported schema_version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
