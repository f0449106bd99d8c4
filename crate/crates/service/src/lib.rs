//! JSON-over-HTTP teaching service.
//!
//! | method | path | |
//! |---|---|---|
//! | POST | `/sessions` | create a session |
//! | POST | `/sessions/from-snapshot` | create a session from a memory snapshot |
//! | GET | `/sessions/{id}` | session summary |
//! | GET | `/sessions/{id}/sequences` | ids of the session dataset's sequences |
//! | POST | `/sessions/{id}/encounters` | submit an encounter |
//! | GET | `/sessions/{id}/query` | the pending question, if any |
//! | POST | `/sessions/{id}/answer` | answer the pending question |
//! | GET | `/sessions/{id}/hierarchy` | current hierarchy |
//! | POST | `/sessions/{id}/snapshot` | memory snapshot document |
//!
//! Sessions are isolated from each other. Requests on one session run one
//! at a time on the blocking pool, so a long scan never stalls the runtime.
//! Request and response bodies are described in `openapi.yaml`.

mod error;
pub mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path, Query as QueryParams, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use tower_http::trace::TraceLayer;
use uuid::Uuid;
use vsem::{Dataset, HierarchyView};

pub use error::ApiError;
pub use session::{EncounterSource, ProcessingState, Query, QueryKind, Session, SessionConfig, StepResponse};

#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<Uuid, Arc<Mutex<Session>>>>,
    /// Dataset given to sessions that do not name their own.
    default_dataset: Option<Arc<Dataset>>,
}

impl AppState {
    pub fn new(default_dataset: Option<Dataset>) -> Self {
        AppState {
            sessions: RwLock::default(),
            default_dataset: default_dataset.map(Arc::new),
        }
    }

    fn insert(&self, session: Session) -> Uuid {
        let id = Uuid::new_v4();
        self.sessions
            .write()
            .expect("session table poisoned")
            .insert(id, Arc::new(Mutex::new(session)));
        id
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let uuid = Uuid::parse_str(id).map_err(|_| ApiError::not_found(format!("no session {id}")))?;
        self.sessions
            .read()
            .expect("session table poisoned")
            .get(&uuid)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no session {id}")))
    }
}

type Shared = Arc<AppState>;

/// Runs `f` on the session with exclusive access, off the async runtime.
async fn with_session<T, F>(state: &Shared, id: &str, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&mut Session) -> Result<T, ApiError> + Send + 'static,
{
    let session = state.get(id)?;
    tokio::task::spawn_blocking(move || {
        let mut guard = session.lock().unwrap_or_else(|p| p.into_inner());
        f(&mut guard)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreateSessionRequest {
    pub window: Option<usize>,
    pub stride: Option<usize>,
    /// Path of a dataset manifest readable by the server.
    pub dataset: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: Uuid,
    pub config: SessionConfig,
    pub iteration: u64,
    pub objects: usize,
    pub theta: f64,
    pub has_dataset: bool,
    pub pending_query: Option<QueryKind>,
}

fn info(id: Uuid, s: &Session) -> SessionInfo {
    SessionInfo {
        session_id: id,
        config: s.config(),
        iteration: s.memory().iteration(),
        objects: s.memory().len(),
        theta: s.memory().theta(),
        has_dataset: s.dataset().is_some(),
        pending_query: s.query().map(|q| q.kind),
    }
}

fn session_config(window: Option<usize>, stride: Option<usize>) -> SessionConfig {
    let d = SessionConfig::default();
    SessionConfig {
        window: window.unwrap_or(d.window),
        stride: stride.unwrap_or(d.stride),
    }
}

async fn create_session(
    State(state): State<Shared>,
    body: Option<Json<CreateSessionRequest>>,
) -> Result<impl IntoResponse, ApiError> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let config = session_config(req.window, req.stride);
    let dataset = match req.dataset {
        Some(path) => Some(Arc::new(
            tokio::task::spawn_blocking(move || Dataset::load(path))
                .await
                .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??,
        )),
        None => state.default_dataset.clone(),
    };
    let session = Session::new(config, dataset)?;
    let id = state.insert(session);
    tracing::info!(%id, ?config, "session created");
    let body = with_session(&state, &id.to_string(), move |s| Ok(info(id, s))).await?;
    Ok((StatusCode::CREATED, Json(body)))
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FromSnapshotParams {
    pub window: Option<usize>,
    pub stride: Option<usize>,
}

async fn session_from_snapshot(
    State(state): State<Shared>,
    QueryParams(params): QueryParams<FromSnapshotParams>,
    body: String,
) -> Result<impl IntoResponse, ApiError> {
    let memory = tokio::task::spawn_blocking(move || vsem::snapshot::from_json(&body))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    let session = Session::with_memory(
        session_config(params.window, params.stride),
        state.default_dataset.clone(),
        memory,
    )?;
    let id = state.insert(session);
    let body = with_session(&state, &id.to_string(), move |s| Ok(info(id, s))).await?;
    Ok((StatusCode::CREATED, Json(body)))
}

async fn get_session(State(state): State<Shared>, Path(id): Path<String>) -> Result<Json<SessionInfo>, ApiError> {
    let uuid = Uuid::parse_str(&id).map_err(|_| ApiError::not_found(format!("no session {id}")))?;
    with_session(&state, &id, move |s| Ok(Json(info(uuid, s)))).await
}

async fn list_sequences(State(state): State<Shared>, Path(id): Path<String>) -> Result<Json<Vec<String>>, ApiError> {
    with_session(&state, &id, |s| {
        let dataset = s
            .dataset()
            .ok_or_else(|| ApiError::not_found("this session has no dataset"))?;
        Ok(Json(dataset.sequences.iter().map(|q| q.sequence_id.clone()).collect()))
    })
    .await
}

async fn submit_encounter(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Json(source): Json<EncounterSource>,
) -> Result<Json<StepResponse>, ApiError> {
    with_session(&state, &id, move |s| s.submit(source).map(Json)).await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PendingResponse {
    pub query: Option<Query>,
}

async fn get_query(State(state): State<Shared>, Path(id): Path<String>) -> Result<Json<PendingResponse>, ApiError> {
    with_session(&state, &id, |s| Ok(Json(PendingResponse { query: s.query() }))).await
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerRequest {
    pub answer: bool,
    /// When given, must match the pending query's kind.
    #[serde(default)]
    pub kind: Option<QueryKind>,
}

async fn answer(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Json(req): Json<AnswerRequest>,
) -> Result<Json<StepResponse>, ApiError> {
    with_session(&state, &id, move |s| s.answer(req.answer, req.kind).map(Json)).await
}

async fn hierarchy(State(state): State<Shared>, Path(id): Path<String>) -> Result<Json<HierarchyView>, ApiError> {
    with_session(&state, &id, |s| s.hierarchy().map(Json)).await
}

async fn take_snapshot(State(state): State<Shared>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let json = with_session(&state, &id, |s| Ok(s.snapshot())).await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], json))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/from-snapshot", post(session_from_snapshot))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/sequences", get(list_sequences))
        .route("/sessions/{id}/encounters", post(submit_encounter))
        .route("/sessions/{id}/query", get(get_query))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/hierarchy", get(hierarchy))
        .route("/sessions/{id}/snapshot", post(take_snapshot))
        .layer(CorsLayer::permissive())
        .layer(TraceLayer::new_for_http())
        .with_state(Arc::new(state))
}

/// Serves until ctrl-c.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
