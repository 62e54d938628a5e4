use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use gridbench::eval::EvalError;
use gridbench::EnvError;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("episode already finished")]
    EpisodeFinished,
    #[error("invalid action code {0}")]
    InvalidAction(i64),
    #[error("episode is still running")]
    EpisodeStillRunning,
    #[error("session limit of {0} reached")]
    CapacityExceeded(usize),
    #[error("missing or wrong bearer token")]
    Unauthorized,
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    pub fn kind(&self) -> &'static str {
        match self {
            ServiceError::UnknownTask(_) => "UnknownTask",
            ServiceError::UnknownSession(_) => "UnknownSession",
            ServiceError::EpisodeFinished => "EpisodeFinished",
            ServiceError::InvalidAction(_) => "InvalidAction",
            ServiceError::EpisodeStillRunning => "EpisodeStillRunning",
            ServiceError::CapacityExceeded(_) => "CapacityExceeded",
            ServiceError::Unauthorized => "Unauthorized",
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::Internal(_) => "Internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::UnknownTask(_) | ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::EpisodeFinished | ServiceError::EpisodeStillRunning => StatusCode::CONFLICT,
            ServiceError::InvalidAction(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::CapacityExceeded(_) => StatusCode::SERVICE_UNAVAILABLE,
            ServiceError::Unauthorized => StatusCode::UNAUTHORIZED,
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl From<EnvError> for ServiceError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::UnknownTask(t) => ServiceError::UnknownTask(t),
            EnvError::EpisodeFinished => ServiceError::EpisodeFinished,
            EnvError::InvalidAction(a) => ServiceError::InvalidAction(a),
            EnvError::UnknownDifficulty(_) => ServiceError::BadRequest(e.to_string()),
            other => ServiceError::Internal(other.to_string()),
        }
    }
}

impl From<EvalError> for ServiceError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Env(inner) => inner.into(),
            other => ServiceError::Internal(other.to_string()),
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        if self.status().is_server_error() {
            log::error!("{self}");
        }
        let body = json!({ "error": self.kind(), "message": self.to_string() });
        (self.status(), Json(body)).into_response()
    }
}
