use serde_json::{json, Value};

use crate::session::State;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ServiceError {
    #[error("no session {0:?}")]
    NoSession(String),
    #[error("session is at version {actual}, request expected {expected}")]
    VersionConflict { expected: u64, actual: u64 },
    #[error("{request} is not accepted while the session is {state:?}")]
    BadState { state: State, request: &'static str },
    #[error("{0} is not available yet")]
    NotReady(&'static str),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("storage failure: {0}")]
    Storage(String),
    #[error(transparent)]
    Core(#[from] vizreq_core::Error),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::NoSession(_) => "E_NO_SESSION",
            ServiceError::VersionConflict { .. } => "E_VERSION_CONFLICT",
            ServiceError::BadState { .. } => "E_BAD_STATE",
            ServiceError::NotReady(_) => "E_NOT_READY",
            ServiceError::BadRequest(_) => "E_BAD_REQUEST",
            ServiceError::Storage(_) => "E_STORAGE",
            ServiceError::Core(e) => e.code(),
        }
    }

    /// HTTP status for the error body.
    pub fn status(&self) -> u16 {
        match self {
            ServiceError::NoSession(_) => 404,
            ServiceError::VersionConflict { .. } => 409,
            ServiceError::Storage(_) => 500,
            _ => 400,
        }
    }

    /// `{code, message}` plus model diagnostics or chart exclusions when present.
    pub fn body(&self) -> Value {
        match self {
            ServiceError::Core(e) => core_error_body(e),
            _ => json!({ "code": self.code(), "message": self.to_string() }),
        }
    }
}

/// Error body for a core error.
pub fn core_error_body(e: &vizreq_core::Error) -> Value {
    let mut body = json!({ "code": e.code(), "message": e.to_string() });
    if !e.diagnostics().is_empty() {
        body["diagnostics"] = serde_json::to_value(e.diagnostics()).expect("diagnostics serialize");
    }
    if let vizreq_core::Error::NoFeasibleChart { excluded, .. } = e {
        body["excluded"] = serde_json::to_value(excluded).expect("exclusions serialize");
    }
    body
}
