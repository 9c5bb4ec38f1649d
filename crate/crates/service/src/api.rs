//! HTTP routes. Handlers only translate between JSON and engine calls; all
//! behavior lives in the engine.

use std::convert::Infallible;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::Stream;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::sync::broadcast;

use blendvis_core::data::{load_csv, Attribute, CsvOptions};
use blendvis_core::intent::Demonstration;
use blendvis_core::script::{execute, Command, Outcome};
use blendvis_core::session::Commit;

use crate::error::ApiError;
use crate::state::{AppState, Event};

pub const BASE_REVISION: &str = "x-base-revision";
pub const REVISION: &str = "x-revision";

/// Ops accepted by `POST /sessions/{id}/ops/{op}`.
pub const OPS: [&str; 8] = ["set_axis", "set_mark", "switch", "filter", "sort", "remove", "update_filter", "remove_filter"];

type ApiResult = Result<Response, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_info).delete(delete_session))
        .route("/sessions/{id}/spec", get(spec))
        .route("/sessions/{id}/view", get(view))
        .route("/sessions/{id}/filters", get(filters))
        .route("/sessions/{id}/shelves", get(shelves))
        .route("/sessions/{id}/recommendations", get(recommendations))
        .route("/sessions/{id}/recommendations/reject", post(reject_all))
        .route("/sessions/{id}/ops/{op}", post(op))
        .route("/sessions/{id}/demonstrations", post(demonstrate))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/redo", post(redo))
        .route("/sessions/{id}/events", get(events))
        .route("/recommendations/{rid}/{action}", post(recommendation))
        .with_state(state)
}

/// A JSON body already serialized by the engine, sent verbatim.
fn raw_json(text: String, revision: u64) -> Response {
    let mut res = (StatusCode::OK, text).into_response();
    res.headers_mut().insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    with_revision(res, revision)
}

fn json<T: Serialize>(body: &T, revision: u64) -> Response {
    with_revision(Json(body).into_response(), revision)
}

fn with_revision(mut res: Response, revision: u64) -> Response {
    res.headers_mut().insert(REVISION, HeaderValue::from(revision));
    res
}

fn base_revision(headers: &HeaderMap) -> Result<Option<u64>, ApiError> {
    headers
        .get(BASE_REVISION)
        .map(|v| {
            v.to_str()
                .ok()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| ApiError::BadRequest(format!("{BASE_REVISION} must be an unsigned integer")))
        })
        .transpose()
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    let bytes: &[u8] = if body.iter().all(u8::is_ascii_whitespace) { b"{}" } else { body };
    serde_json::from_slice(bytes).map_err(|e| ApiError::BadRequest(e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    /// File name inside the data directory.
    #[serde(default)]
    pub dataset: Option<String>,
    /// Inline CSV upload.
    #[serde(default)]
    pub csv: Option<String>,
    /// Dataset id for an uploaded CSV.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub session_id: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub id: String,
    pub row_count: usize,
    pub attributes: Vec<Attribute>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub revision: u64,
    pub dataset: DatasetInfo,
}

/// Body of a successful state-changing call.
#[derive(Debug, Clone, Serialize)]
pub struct Committed<T> {
    pub revision: u64,
    #[serde(flatten)]
    pub body: T,
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: CreateSession = parse_body(&body)?;
    let dataset = match (req.dataset, req.csv) {
        (Some(name), None) => state.dataset(&name)?,
        (None, Some(csv)) => {
            let id = req.name.unwrap_or_else(|| "upload".to_string());
            Arc::new(load_csv(csv.as_bytes(), &CsvOptions::named(id))?)
        }
        _ => return Err(ApiError::BadRequest("give exactly one of `dataset` or `csv`".into())),
    };
    let id = state.create(req.session_id, dataset)?;
    let info = info(&state, &id)?;
    Ok((StatusCode::CREATED, json(&info, info.revision)).into_response())
}

fn info(state: &AppState, id: &str) -> Result<SessionInfo, ApiError> {
    let handle = state.session(id)?;
    let s = handle.lock();
    let ds = s.dataset();
    Ok(SessionInfo {
        session_id: id.to_string(),
        revision: s.revision(),
        dataset: DatasetInfo { id: ds.id().to_string(), row_count: ds.row_count(), attributes: ds.attributes().to_vec() },
    })
}

async fn session_info(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let info = info(&state, &id)?;
    Ok(json(&info, info.revision))
}

async fn delete_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    state.remove(&id)?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn spec(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let handle = state.session(&id)?;
    let s = handle.lock();
    Ok(raw_json(s.spec().canonical_json(), s.revision()))
}

async fn view(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let handle = state.session(&id)?;
    let s = handle.lock();
    Ok(raw_json(s.view()?.canonical_json(), s.revision()))
}

async fn filters(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let handle = state.session(&id)?;
    let s = handle.lock();
    Ok(json(&s.filters()?, s.revision()))
}

async fn shelves(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let handle = state.session(&id)?;
    let s = handle.lock();
    Ok(json(&s.shelves(), s.revision()))
}

/// The presented recommendations, or `null` before the first demonstration.
async fn recommendations(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let handle = state.session(&id)?;
    let s = handle.lock();
    Ok(json(&s.presentation(), s.revision()))
}

async fn reject_all(State(state): State<Arc<AppState>>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    let handle = state.session(&id)?;
    let (presentation, revision) = handle.write(base_revision(&headers)?, |s| {
        s.reject_all();
        Ok(s.presentation())
    })?;
    Ok(json(&presentation, revision))
}

async fn op(
    State(state): State<Arc<AppState>>,
    Path((id, op)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    if !OPS.contains(&op.as_str()) {
        return Err(ApiError::UnknownOp(op));
    }
    let handle = state.session(&id)?;
    let mut fields: Value = parse_body(&body)?;
    let Some(map) = fields.as_object_mut() else {
        return Err(ApiError::BadRequest("op body must be a JSON object".into()));
    };
    map.insert("op".into(), Value::String(op));
    let command: Command = serde_json::from_value(fields).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let (outcome, revision) = handle.write(base_revision(&headers)?, |s| execute(s, &command))?;
    Ok(json(&Committed { revision, body: outcome }, revision))
}

async fn demonstrate(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let demonstration: Demonstration = parse_body(&body)?;
    let handle = state.session(&id)?;
    let command = Command::Demonstrate { demonstration };
    let (outcome, revision) = handle.write(base_revision(&headers)?, |s| execute(s, &command))?;
    match outcome {
        Outcome::Recommendations { presentation } => Ok(json(&presentation, revision)),
        other => Ok(json(&other, revision)),
    }
}

fn commit_response(commit: Commit) -> Response {
    let revision = commit.revision;
    json(&Committed { revision, body: commit }, revision)
}

async fn undo(State(state): State<Arc<AppState>>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    let handle = state.session(&id)?;
    let (commit, _) = handle.write(base_revision(&headers)?, |s| s.undo())?;
    Ok(commit_response(commit))
}

async fn redo(State(state): State<Arc<AppState>>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    let handle = state.session(&id)?;
    let (commit, _) = handle.write(base_revision(&headers)?, |s| s.redo())?;
    Ok(commit_response(commit))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Rejected {
    pub rec_id: String,
    pub state: blendvis_core::recommend::RecState,
}

async fn recommendation(
    State(state): State<Arc<AppState>>,
    Path((rid, action)): Path<(String, String)>,
    headers: HeaderMap,
) -> ApiResult {
    let handle = state.session_for_recommendation(&rid)?;
    let base = base_revision(&headers)?;
    match action.as_str() {
        "preview" => {
            let s = handle.lock();
            if let Some(expected) = base.filter(|b| *b != s.revision()) {
                return Err(blendvis_core::Error::StaleRevision { expected, actual: s.revision() }.into());
            }
            Ok(raw_json(s.preview(&rid)?.canonical_json(), s.revision()))
        }
        "accept" => {
            let (commit, _) = handle.write(base, |s| s.accept(&rid))?;
            Ok(commit_response(commit))
        }
        "reject" => {
            let (_, revision) = handle.write(base, |s| s.reject(&rid))?;
            let body = Rejected { rec_id: rid, state: blendvis_core::recommend::RecState::Rejected };
            Ok(json(&body, revision))
        }
        _ => Err(ApiError::UnknownOp(action)),
    }
}

fn event_stream(rx: broadcast::Receiver<Event>) -> impl Stream<Item = Result<SseEvent, Infallible>> {
    futures::stream::unfold(rx, |mut rx| async move {
        let event = rx.recv().await.ok()?;
        let sse = SseEvent::default().event(event.name()).json_data(&event).expect("events serialize");
        Some((Ok(sse), rx))
    })
}

async fn events(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let rx = state.session(&id)?.subscribe();
    Ok(Sse::new(event_stream(rx)).keep_alive(KeepAlive::default()))
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(state: Arc<AppState>, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
