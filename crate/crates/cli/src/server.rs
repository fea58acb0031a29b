//! Local HTTP JSON endpoint for interactive mutation sessions.
//!
//! Every route takes an optional `?session=` id (default `default`);
//! sessions start at the workspace seed and are never written to disk.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Query, State as Extract};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::net::TcpListener;

use crate::error::CliError;
use crate::session::{Session, State, Step, PROTOCOL};

struct Shared {
    initial: State,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next: AtomicUsize,
}

#[derive(Clone)]
pub struct AppState(Arc<Shared>);

impl AppState {
    pub fn new(initial: State) -> Self {
        AppState(Arc::new(Shared { initial, sessions: Mutex::new(HashMap::new()), next: AtomicUsize::new(1) }))
    }

    fn session(&self, id: &str) -> Arc<Mutex<Session>> {
        let mut map = self.0.sessions.lock().expect("session map");
        map.entry(id.to_string()).or_insert_with(|| Arc::new(Mutex::new(Session::new(self.0.initial.clone())))).clone()
    }
}

#[derive(Deserialize)]
pub struct SessionQuery {
    session: Option<String>,
}

impl SessionQuery {
    fn id(&self) -> &str {
        self.session.as_deref().unwrap_or("default")
    }
}

#[derive(Deserialize)]
struct ArcRequest {
    arc: usize,
    protocol: Option<u32>,
}

#[derive(Deserialize)]
struct OrbitRequest {
    orbit: usize,
    protocol: Option<u32>,
}

pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({"protocol": PROTOCOL, "error": self.1}))).into_response()
    }
}

impl From<CliError> for ApiError {
    fn from(e: CliError) -> Self {
        let status = match e.exit_code() {
            1 => StatusCode::BAD_REQUEST,
            2 => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError(StatusCode::BAD_REQUEST, e.body_text())
    }
}

fn check_protocol(p: Option<u32>) -> Result<(), ApiError> {
    match p {
        Some(v) if v != PROTOCOL => Err(ApiError(StatusCode::BAD_REQUEST, format!("protocol {v} not supported"))),
        _ => Ok(()),
    }
}

fn state_json(id: &str, s: &Session) -> Value {
    serde_json::to_value(s.current().payload(id, s.len())).expect("serializable")
}

fn step_json(id: &str, step: &Step, s: &Session) -> Value {
    json!({"protocol": PROTOCOL, "step": step, "state": state_json(id, s)})
}

async fn get_state(Extract(app): Extract<AppState>, Query(q): Query<SessionQuery>) -> Json<Value> {
    let s = app.session(q.id());
    let s = s.lock().expect("session");
    Json(state_json(q.id(), &s))
}

async fn post_mutate(
    Extract(app): Extract<AppState>,
    Query(q): Query<SessionQuery>,
    body: Result<Json<ArcRequest>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let Json(req) = body?;
    check_protocol(req.protocol)?;
    let s = app.session(q.id());
    let mut s = s.lock().expect("session");
    let step = s.mutate(req.arc)?;
    Ok(Json(step_json(q.id(), &step, &s)))
}

async fn post_orbit_mutate(
    Extract(app): Extract<AppState>,
    Query(q): Query<SessionQuery>,
    body: Result<Json<OrbitRequest>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let Json(req) = body?;
    check_protocol(req.protocol)?;
    let s = app.session(q.id());
    let mut s = s.lock().expect("session");
    let step = s.orbit_mutate(req.orbit)?;
    Ok(Json(step_json(q.id(), &step, &s)))
}

async fn post_undo(Extract(app): Extract<AppState>, Query(q): Query<SessionQuery>) -> Result<Json<Value>, ApiError> {
    let s = app.session(q.id());
    let mut s = s.lock().expect("session");
    match s.undo() {
        Some(step) => Ok(Json(json!({"protocol": PROTOCOL, "undone": step, "state": state_json(q.id(), &s)}))),
        None => Err(ApiError(StatusCode::CONFLICT, "nothing to undo: the session is at the start of its history".into())),
    }
}

async fn get_history(Extract(app): Extract<AppState>, Query(q): Query<SessionQuery>) -> Json<Value> {
    let s = app.session(q.id());
    let s = s.lock().expect("session");
    Json(json!({"protocol": PROTOCOL, "session": q.id(), "steps": s.steps()}))
}

async fn post_session(Extract(app): Extract<AppState>) -> Json<Value> {
    let id = format!("s{}", app.0.next.fetch_add(1, Ordering::Relaxed));
    let s = app.session(&id);
    let s = s.lock().expect("session");
    Json(state_json(&id, &s))
}

pub fn router(initial: State) -> Router {
    Router::new()
        .route("/state", get(get_state))
        .route("/mutate", post(post_mutate))
        .route("/orbit-mutate", post(post_orbit_mutate))
        .route("/undo", post(post_undo))
        .route("/history", get(get_history))
        .route("/sessions", post(post_session))
        .with_state(AppState::new(initial))
}

pub async fn bind(port: u16) -> Result<TcpListener, CliError> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    TcpListener::bind(addr).await.map_err(|e| CliError::Usage(format!("cannot listen on {addr}: {e}")))
}

pub async fn serve(listener: TcpListener, initial: State) -> Result<(), CliError> {
    axum::serve(listener, router(initial)).await.map_err(|e| CliError::Internal(e.to_string()))
}
