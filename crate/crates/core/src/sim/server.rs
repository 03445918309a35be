//! HTTP/JSON session service over the animation engine.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Map, Value as JsonValue};
use tokio::sync::RwLock;
use tower_http::services::ServeDir;

use super::{SimError, SimSession};
use crate::checker::{check_all, CheckOptions, DEFAULT_BUDGET};
use crate::eb::{Bounds, Project};
use crate::ebtext::parse_project;
use crate::project::LoadedProject;

pub const DEFAULT_IDLE_EXPIRY: Duration = Duration::from_secs(30 * 60);

struct Slot {
    session: RwLock<SimSession>,
    touched: Mutex<Instant>,
}

struct Inner {
    projects: BTreeMap<String, LoadedProject>,
    sessions: Mutex<HashMap<String, Arc<Slot>>>,
    idle_expiry: Duration,
    ui_dir: Option<PathBuf>,
}

/// Shared service state: the loaded projects and live sessions.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(projects: Vec<LoadedProject>) -> Self {
        Self::with_options(projects, DEFAULT_IDLE_EXPIRY, None)
    }

    pub fn with_options(projects: Vec<LoadedProject>, idle_expiry: Duration, ui_dir: Option<PathBuf>) -> Self {
        let projects = projects.into_iter().map(|p| (p.project.name.clone(), p)).collect();
        AppState(Arc::new(Inner { projects, sessions: Mutex::new(HashMap::new()), idle_expiry, ui_dir }))
    }

    pub fn session_count(&self) -> usize {
        self.purge();
        self.0.sessions.lock().unwrap().len()
    }

    fn purge(&self) {
        let ttl = self.0.idle_expiry;
        self.0.sessions.lock().unwrap().retain(|_, s| s.touched.lock().unwrap().elapsed() <= ttl);
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        self.purge();
        let slot = self.0.sessions.lock().unwrap().get(id).cloned();
        let slot = slot.ok_or_else(|| ApiError::not_found(format!("no session `{id}`")))?;
        *slot.touched.lock().unwrap() = Instant::now();
        Ok(slot)
    }
}

pub struct ApiError {
    status: StatusCode,
    body: JsonValue,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, body: json!({ "error": message.into() }) }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::new(e.status(), e.body_text())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(e.status(), e.body_text())
    }
}

impl From<SimError> for ApiError {
    fn from(e: SimError) -> Self {
        let message = e.to_string();
        match e {
            SimError::GuardFailed(label) => {
                ApiError { status: StatusCode::CONFLICT, body: json!({ "error": message, "failed_guard": label }) }
            }
            SimError::EventError(detail) => {
                ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, body: json!({ "error": message, "event_error": detail }) }
            }
            SimError::NothingToUndo => ApiError::new(StatusCode::CONFLICT, message),
            SimError::UnknownEvent(_) | SimError::UnknownMachine(_) => ApiError::not_found(message),
            SimError::NoConstantModel | SimError::InitInvariantViolation(_) | SimError::InitFailed(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, message)
            }
            _ => ApiError::bad_request(message),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult = Result<Json<JsonValue>, ApiError>;

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/api/projects", get(list_projects))
        .route("/api/projects/{id}/pos", get(project_pos))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}/state", get(session_state))
        .route("/api/sessions/{id}/events", get(session_events))
        .route("/api/sessions/{id}/fire", post(fire))
        .route("/api/sessions/{id}/undo", post(undo))
        .route("/api/sessions/{id}/reset", post(reset))
        .route("/api/sessions/{id}/trace", get(trace));
    let api = match &state.0.ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    api.with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

async fn list_projects(State(st): State<AppState>) -> ApiResult {
    let list: Vec<JsonValue> =
        st.0.projects
            .values()
            .map(|p| {
                json!({
                    "id": p.project.name,
                    "machines": p.project.machines.iter().map(|m| m.name.clone()).collect::<Vec<_>>(),
                })
            })
            .collect();
    Ok(Json(JsonValue::Array(list)))
}

#[derive(Deserialize)]
struct PosQuery {
    addr: Option<u32>,
    lo: Option<i64>,
    hi: Option<i64>,
    #[serde(default)]
    all: bool,
}

fn bounds_from(addr: Option<u32>, lo: Option<i64>, hi: Option<i64>) -> Result<Bounds, ApiError> {
    let d = Bounds::default();
    Bounds::new(addr.unwrap_or(d.addr_count), lo.map_or(d.int_lo, i128::from), hi.map_or(d.int_hi, i128::from))
        .map_err(|e| ApiError::bad_request(e.to_string()))
}

async fn project_pos(
    State(st): State<AppState>,
    Path(id): Path<String>,
    q: Result<Query<PosQuery>, QueryRejection>,
) -> ApiResult {
    let Query(q) = q?;
    let loaded = st.0.projects.get(&id).cloned().ok_or_else(|| ApiError::not_found(format!("no project `{id}`")))?;
    let opts = CheckOptions { bounds: bounds_from(q.addr, q.lo, q.hi)?, budget: DEFAULT_BUDGET, all: q.all };
    let report = tokio::task::spawn_blocking(move || check_all(&loaded.project, &opts, loaded.report.as_ref()))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    Ok(Json(serde_json::to_value(&report).expect("report serializes")))
}

#[derive(Deserialize)]
struct SourceFile {
    name: String,
    text: String,
}

#[derive(Deserialize)]
struct CreateSession {
    project: Option<String>,
    files: Option<Vec<SourceFile>>,
    machine: Option<String>,
    #[serde(default)]
    constants: Map<String, JsonValue>,
    bounds: Option<Bounds>,
}

async fn create_session(State(st): State<AppState>, req: Result<Json<CreateSession>, JsonRejection>) -> ApiResult {
    let Json(req) = req?;
    let project: Project = match (&req.project, &req.files) {
        (_, Some(files)) => {
            let files: Vec<(String, String)> = files.iter().map(|f| (f.name.clone(), f.text.clone())).collect();
            parse_project(req.project.as_deref().unwrap_or("inline"), &files).map_err(|e| ApiError::bad_request(e.to_string()))?
        }
        (Some(id), None) => {
            st.0.projects.get(id).ok_or_else(|| ApiError::not_found(format!("no project `{id}`")))?.project.clone()
        }
        (None, None) => match st.0.projects.values().next() {
            Some(p) if st.0.projects.len() == 1 => p.project.clone(),
            _ => return Err(ApiError::bad_request("specify `project` or `files`")),
        },
    };
    let bounds = match req.bounds {
        Some(b) => {
            b.validate().map_err(|e| ApiError::bad_request(e.to_string()))?;
            b
        }
        None => Bounds::default(),
    };
    let fixed = super::decode_constants(&project, req.machine.as_deref(), &req.constants, &bounds)?;
    let session = SimSession::new(&project, req.machine.as_deref(), &fixed, bounds)?;
    let state = session.state_json();
    let id = uuid::Uuid::new_v4().to_string();
    st.purge();
    let slot = Slot { session: RwLock::new(session), touched: Mutex::new(Instant::now()) };
    st.0.sessions.lock().unwrap().insert(id.clone(), Arc::new(slot));
    Ok(Json(json!({ "session_id": id, "state": state })))
}

async fn session_state(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let slot = st.slot(&id)?;
    let s = slot.session.read().await;
    Ok(Json(s.state_json()))
}

async fn session_events(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let slot = st.slot(&id)?;
    let s = slot.session.read().await;
    let offers = s.enabled_events()?;
    Ok(Json(JsonValue::Array(offers.iter().map(|o| o.to_json()).collect())))
}

#[derive(Deserialize)]
struct FireRequest {
    event: String,
    #[serde(default)]
    params: Map<String, JsonValue>,
}

async fn fire(State(st): State<AppState>, Path(id): Path<String>, req: Result<Json<FireRequest>, JsonRejection>) -> ApiResult {
    let Json(req) = req?;
    let slot = st.slot(&id)?;
    let mut s = slot.session.write().await;
    let params = s.parse_params(&req.event, &req.params)?;
    let r = s.fire(&req.event, &params)?;
    Ok(Json(r.to_json()))
}

async fn undo(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let slot = st.slot(&id)?;
    let mut s = slot.session.write().await;
    Ok(Json(s.undo()?.to_json()))
}

async fn reset(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let slot = st.slot(&id)?;
    let mut s = slot.session.write().await;
    Ok(Json(s.reset().to_json()))
}

async fn trace(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let slot = st.slot(&id)?;
    let s = slot.session.read().await;
    Ok(Json(s.trace_json()))
}
