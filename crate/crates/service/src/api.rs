//! HTTP JSON API over the session store.

use std::future::Future;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tabletop_core::controller::{ResolutionOutcome, SessionError};
use tabletop_core::graph::{build_graph, GraphDump};
use tabletop_core::perception::{detect, Percept, Viewpoint};
use tokio::net::TcpListener;

use crate::store::{SessionHandle, SessionStore};

/// Body of the utterance and answer endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnResponse {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl From<&ResolutionOutcome> for TurnResponse {
    fn from(outcome: &ResolutionOutcome) -> Self {
        let mut r = TurnResponse {
            status: outcome.status().to_string(),
            target: None,
            question: None,
            options: None,
            reason: None,
        };
        match outcome {
            ResolutionOutcome::Resolved { target } => r.target = Some(target.clone()),
            ResolutionOutcome::Question(q) => {
                r.question = Some(q.text.clone());
                r.options = Some(q.options.clone());
            }
            ResolutionOutcome::Failed(reason) => r.reason = Some(reason.to_string()),
        }
        r
    }
}

#[derive(Debug, Deserialize)]
struct CreateSession {
    scene_id: String,
}

#[derive(Debug, Deserialize)]
struct TextBody {
    text: String,
}

/// What the robot currently perceives in a session.
#[derive(Debug, Serialize)]
pub struct PerceivedScene {
    pub session_id: String,
    pub scene_id: String,
    pub state: String,
    pub viewpoint: Viewpoint,
    pub candidates: Vec<String>,
    pub percepts: Vec<Percept>,
    pub graph: GraphDump,
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    Conflict(String),
    Unprocessable(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, message) = match self {
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m),
            ApiError::Conflict(m) => (StatusCode::CONFLICT, m),
            ApiError::Unprocessable(m) => (StatusCode::UNPROCESSABLE_ENTITY, m),
        };
        (status, Json(json!({ "error": message }))).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::Unprocessable(r.body_text())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError::Conflict(e.to_string())
    }
}

type Shared = Arc<SessionStore>;

pub fn router(store: Shared) -> Router {
    Router::new()
        .route("/scenes", get(list_scenes))
        .route("/scenes/{id}", get(get_scene))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/utterance", post(utterance))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/perceived", get(perceived))
        .route("/sessions/{id}/transcript", get(transcript))
        .with_state(store)
}

/// Serves the API on `listener` until `shutdown` completes.
pub async fn serve(
    listener: TcpListener,
    store: Shared,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(store))
        .with_graceful_shutdown(shutdown)
        .await
}

async fn list_scenes(State(store): State<Shared>) -> Json<Vec<String>> {
    Json(store.scenes().ids())
}

async fn get_scene(
    State(store): State<Shared>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let scene = store
        .scenes()
        .get(&id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown scene {id}")))?;
    Ok(Json(scene.as_ref().clone()).into_response())
}

async fn create_session(
    State(store): State<Shared>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<Response, ApiError> {
    let Json(body) = body?;
    let id = store
        .create(&body.scene_id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown scene {}", body.scene_id)))?;
    Ok((StatusCode::CREATED, Json(json!({ "session_id": id }))).into_response())
}

fn session(store: &SessionStore, id: &str) -> Result<SessionHandle, ApiError> {
    store
        .get(id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown session {id}")))
}

async fn utterance(
    State(store): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<TextBody>, JsonRejection>,
) -> Result<Json<TurnResponse>, ApiError> {
    let handle = session(&store, &id)?;
    let Json(body) = body?;
    let mut entry = handle.lock().expect("session lock");
    let scene = entry.scene.clone();
    let outcome = entry.session.handle_utterance(&body.text, &scene)?;
    Ok(Json(TurnResponse::from(&outcome)))
}

async fn answer(
    State(store): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<TextBody>, JsonRejection>,
) -> Result<Json<TurnResponse>, ApiError> {
    let handle = session(&store, &id)?;
    let Json(body) = body?;
    let mut entry = handle.lock().expect("session lock");
    let outcome = entry.session.handle_answer(&body.text)?;
    Ok(Json(TurnResponse::from(&outcome)))
}

/// Percepts and graph of the latest scan; before the first utterance, a
/// scan from the session's current viewpoint.
pub fn perceived_scene(handle: &SessionHandle) -> PerceivedScene {
    let entry = handle.lock().expect("session lock");
    let s = &entry.session;
    let (percepts, graph) = match s.graph() {
        Some(g) => (s.percepts().to_vec(), g.dump()),
        None => {
            let percepts = detect(&entry.scene, s.viewpoint(), s.detector());
            let graph = build_graph(&percepts, s.viewpoint(), &entry.scene.table_bounds).dump();
            (percepts, graph)
        }
    };
    PerceivedScene {
        session_id: s.session_id().to_string(),
        scene_id: s.scene_id().to_string(),
        state: s.state().to_string(),
        viewpoint: *s.viewpoint(),
        candidates: s.candidates().iter().cloned().collect(),
        percepts,
        graph,
    }
}

async fn perceived(
    State(store): State<Shared>,
    Path(id): Path<String>,
) -> Result<Json<PerceivedScene>, ApiError> {
    let handle = session(&store, &id)?;
    Ok(Json(perceived_scene(&handle)))
}

/// Returns the transcript in exactly the byte form the scenario runner
/// writes.
async fn transcript(
    State(store): State<Shared>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let handle = session(&store, &id)?;
    let body = handle
        .lock()
        .expect("session lock")
        .session
        .transcript()
        .to_json();
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}
