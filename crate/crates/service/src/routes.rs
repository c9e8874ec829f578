//! HTTP routes. Every body is JSON except the CSV export; errors carry a
//! machine-readable `error` code next to a human-readable `message`.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use hidden_single_core::export::write_export;
use hidden_single_core::protocol::{Input, FORMAT_VERSION};

use crate::store::{ExportFilter, SessionStore, StoreError};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CreateRequest {
    /// Only honoured when the server allows client seeds.
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Body of `POST /sessions/{id}/events`: an input plus the client's own
/// clock reading, which is stored but never trusted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventRequest {
    #[serde(flatten)]
    pub input: Input,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub format_version: u32,
    pub error: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn bad_request(message: impl ToString) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, code: "bad_request", message: message.to_string() }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let (status, code) = match &e {
            StoreError::UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            StoreError::Protocol(p) if p.is_client_error() => (StatusCode::CONFLICT, p.code()),
            StoreError::Protocol(p) => (StatusCode::INTERNAL_SERVER_ERROR, p.code()),
            StoreError::SeedNotAllowed => (StatusCode::FORBIDDEN, "seed_not_allowed"),
            StoreError::Journal { .. } | StoreError::Index { .. } | StoreError::Io(_) => {
                (StatusCode::INTERNAL_SERVER_ERROR, "storage_failure")
            }
        };
        ApiError { status, code, message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody { format_version: FORMAT_VERSION, error: self.code.into(), message: self.message };
        (self.status, Json(body)).into_response()
    }
}

type Shared = Arc<SessionStore>;

/// Runs blocking store work off the async executor.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, StoreError> + Send + 'static,
) -> Result<T, ApiError> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError::from),
        Err(e) => Err(ApiError { status: StatusCode::INTERNAL_SERVER_ERROR, code: "internal", message: e.to_string() }),
    }
}

async fn create_session(State(store): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateRequest =
        if body.iter().all(u8::is_ascii_whitespace) { CreateRequest::default() } else { serde_json::from_slice(&body).map_err(ApiError::bad_request)? };
    let payload = blocking(move || store.create_session(req.seed)).await?;
    Ok((StatusCode::CREATED, Json(payload)).into_response())
}

async fn get_screen(State(store): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let payload = blocking(move || store.screen(&id)).await?;
    Ok(Json(payload).into_response())
}

async fn post_event(State(store): State<Shared>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: EventRequest = serde_json::from_slice(&body).map_err(ApiError::bad_request)?;
    let payload = blocking(move || store.post_event(&id, req.input, req.client_ms)).await?;
    Ok(Json(payload).into_response())
}

async fn export_csv(
    State(store): State<Shared>,
    filter: Result<Query<ExportFilter>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(filter) = filter.map_err(ApiError::bad_request)?;
    let bytes = blocking(move || {
        let rows = store.export(&filter);
        let mut out = Vec::new();
        write_export(&rows, &mut out).map_err(|e| StoreError::Io(e.into()))?;
        Ok(out)
    })
    .await?;
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], bytes).into_response())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub format_version: u32,
    pub sessions: usize,
}

async fn healthz(State(store): State<Shared>) -> Json<Health> {
    Json(Health { status: "ok".into(), format_version: FORMAT_VERSION, sessions: store.len() })
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/screen", get(get_screen))
        .route("/sessions/{id}/events", post(post_event))
        .route("/export.csv", get(export_csv))
        .route("/healthz", get(healthz))
        .with_state(store)
}
