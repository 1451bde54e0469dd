use std::io;
use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] logsob::Error),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid command line: {0}")]
    Usage(String),

    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    /// A computed quantity broke a hard invariant, such as a negative
    /// seminorm.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Config(_) => "invalid_config",
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Invariant(_) => "invariant_violated",
        }
    }

    /// `{"error": {"code", "message", "parameter"?}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({ "code": self.code(), "message": self.to_string() });
        if let CliError::Core(e) = self {
            if let Some(p) = e.parameter() {
                body["parameter"] = json!(p);
            }
        }
        json!({ "error": body })
    }
}
