use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config syntax: {0}")]
    Syntax(serde_json::Error),
    #[error("config field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Core(#[from] qtraj_core::Error),
    #[error("invariance bound violated: max trace distance {max} > {bound}")]
    BoundViolated { max: f64, bound: f64 },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn field(field: &'static str, reason: impl Into<String>) -> Self {
        CliError::Field { field, reason: reason.into() }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
