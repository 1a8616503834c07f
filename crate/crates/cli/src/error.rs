use std::path::Path;

use kdq::KdError;
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Kd(KdError),
    Io(String),
    Json(serde_json::Error),
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    /// 3 for resource caps, 2 for everything a user can fix in the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Kd(e) if e.is_cap_exceeded() => 3,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (kind, message) = match self {
            CliError::Kd(e) => (e.kind(), e.to_string()),
            CliError::Io(m) => ("Io", m.clone()),
            CliError::Json(e) => ("Json", e.to_string()),
            CliError::Usage(m) => ("Usage", m.clone()),
        };
        json!({ "error": kind, "message": message, "exit_code": self.exit_code() })
    }
}

impl From<KdError> for CliError {
    fn from(e: KdError) -> Self {
        CliError::Kd(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}
