//! Scenario runner for the `ampqed` engine.

pub mod config;
pub mod report;
pub mod suites;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config error: {0}")]
    Schema(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Schema(_) => "config_error",
            ConfigError::Io(_) => "io_error",
        }
    }
}
