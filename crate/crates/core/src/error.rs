use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the physical model itself.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("position z = {z} km lies outside the last segment (length {length} km)")]
    PositionOutOfRange { z: f64, length: f64 },

    #[error("QBER undefined: every detection probability is zero")]
    UndefinedQber,

    #[error("no fiber preset named `{0}`")]
    UnknownPreset(String),
}

impl ModelError {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        ModelError::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}

/// Errors raised while loading a scenario configuration file.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown key `{key}` in [{section}]")]
    UnknownKey { section: String, key: String },

    #[error("value out of range for `{key}`: {reason}")]
    OutOfRange { key: String, reason: String },

    #[error(transparent)]
    Model(#[from] ModelError),
}
