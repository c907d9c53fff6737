use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Core(#[from] rabi_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("config key `{key}`: {message}")]
    BadValue { key: String, message: String },
    #[error("invalid override `{0}` (expected key=value)")]
    BadOverride(String),
    #[error("sweep point {tuple} failed: {source}")]
    SweepPoint {
        tuple: String,
        #[source]
        source: rabi_core::Error,
    },
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

impl ExperimentError {
    /// Stable machine-readable name of the failure.
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentError::Core(e) => e.kind(),
            ExperimentError::Io { .. } => "Io",
            ExperimentError::Csv(_) => "Csv",
            ExperimentError::Json(_) => "Json",
            ExperimentError::Toml(_) => "ConfigSyntax",
            ExperimentError::BadValue { .. } => "BadValue",
            ExperimentError::BadOverride(_) => "BadOverride",
            ExperimentError::SweepPoint { .. } => "SweepPoint",
        }
    }

    pub(crate) fn bad_value(key: &str, message: impl Into<String>) -> Self {
        ExperimentError::BadValue {
            key: key.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ExperimentError::Io {
            path: path.into(),
            source,
        }
    }
}
