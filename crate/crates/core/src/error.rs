use std::path::PathBuf;

use thiserror::Error;

/// Invalid configuration or parameter values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown preset `{name}`; available presets: {available}")]
    UnknownPreset { name: String, available: String },
}

impl ConfigError {
    pub fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

/// Failures raised while advancing the discrete system.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("non-finite {field} at node ({i}, {j}) while computing step {step}")]
    BlowUp {
        step: usize,
        field: &'static str,
        i: usize,
        j: usize,
    },
    #[error("total height phi = {phi:e} <= 0 at node ({i}, {j}) at step {step}")]
    DryState {
        step: usize,
        i: usize,
        j: usize,
        phi: f64,
    },
}

impl SolverError {
    pub fn step(&self) -> usize {
        match self {
            SolverError::BlowUp { step, .. } | SolverError::DryState { step, .. } => *step,
        }
    }
}

/// Misuse of an analysis routine (bad series lengths, parameter out of range).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

/// Top-level error type for run orchestration.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Usage(#[from] UsageError),
    #[error(transparent)]
    Io(#[from] IoError),
}
