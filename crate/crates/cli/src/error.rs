use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or inputs; nothing was computed.
    #[error("{}", findings_message(.0))]
    Validation(Vec<String>),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] polarscope::Error),

    #[error("{0}")]
    Runtime(String),
}

fn findings_message(findings: &[String]) -> String {
    match findings {
        [one] => one.clone(),
        many => format!("{} validation findings:\n  {}", many.len(), many.join("\n  ")),
    }
}

#[derive(Debug, Serialize)]
struct ErrorReport<'a> {
    exit_code: i32,
    kind: &'a str,
    message: String,
    findings: &'a [String],
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError::Validation(vec![message.into()])
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 for validation failures, 2 for runtime errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Core(e) if is_validation(e) => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        if self.exit_code() == 1 {
            "validation"
        } else {
            "runtime"
        }
    }

    pub fn to_json(&self) -> String {
        let findings = match self {
            CliError::Validation(f) => f.as_slice(),
            _ => &[],
        };
        let report =
            ErrorReport { exit_code: self.exit_code(), kind: self.kind(), message: self.to_string(), findings };
        serde_json::to_string(&report).expect("plain data")
    }
}

fn is_validation(e: &polarscope::Error) -> bool {
    use polarscope::Error::*;
    matches!(e, Config(_) | InvalidSpec(_) | UnknownTimezone(_))
}
