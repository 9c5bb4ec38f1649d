use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use blendvis_core::ErrorClass;

#[derive(Debug, Error)]
pub enum ApiError {
    #[error(transparent)]
    Engine(#[from] blendvis_core::Error),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("session `{0}` already exists")]
    SessionExists(String),
    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("bad request: {0}")]
    BadRequest(String),
}

/// JSON body of every error response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl ApiError {
    pub fn code(&self) -> &'static str {
        match self {
            ApiError::Engine(e) => e.code(),
            ApiError::UnknownSession(_) => "UnknownSession",
            ApiError::SessionExists(_) => "SessionExists",
            ApiError::UnknownDataset(_) => "UnknownDataset",
            ApiError::UnknownOp(_) => "UnknownOp",
            ApiError::BadRequest(_) => "BadRequest",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::Engine(e) => match e.class() {
                ErrorClass::NotFound => StatusCode::NOT_FOUND,
                ErrorClass::Conflict => StatusCode::CONFLICT,
                ErrorClass::Unprocessable => StatusCode::UNPROCESSABLE_ENTITY,
                ErrorClass::BadRequest => StatusCode::BAD_REQUEST,
            },
            ApiError::UnknownSession(_) | ApiError::UnknownDataset(_) | ApiError::UnknownOp(_) => {
                StatusCode::NOT_FOUND
            }
            ApiError::SessionExists(_) => StatusCode::CONFLICT,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody { error: self.code().to_string(), message: self.to_string() };
        (self.status(), Json(body)).into_response()
    }
}
