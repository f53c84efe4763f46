//! HTTP+JSON service: one time-travelling simulation per session.
//!
//! Every mutating endpoint returns the full state document, so clients never
//! need to poll.

mod error;
mod session;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use mlfq_sim_core::metrics::RunStats;
use mlfq_sim_core::scenario::{self, Scenario};
use mlfq_sim_core::{Config, SimTime, StateDocument, Timeline, TraceRecord};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::cors::CorsLayer;
use tower_http::services::{ServeDir, ServeFile};

pub use error::ApiError;
pub use session::{Session, Sessions};

/// Largest |dt| accepted by `/step`.
pub const MAX_STEP: i64 = 250;
pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(60 * 60);

#[derive(Debug, Clone)]
pub struct Options {
    pub idle_timeout: Duration,
    pub ui_dir: Option<PathBuf>,
    pub scenario_dir: Option<PathBuf>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
            ui_dir: None,
            scenario_dir: None,
        }
    }
}

pub struct AppState {
    pub sessions: Sessions,
    catalog: Vec<Scenario>,
}

impl AppState {
    pub fn new(opts: &Options) -> Result<Self, String> {
        Ok(Self {
            sessions: Sessions::new(opts.idle_timeout),
            catalog: scenario::catalog(opts.scenario_dir.as_deref())?,
        })
    }
}

type Shared = State<Arc<AppState>>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Arc<AppState>, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/scenarios", get(list_scenarios))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}/state", get(get_state))
        .route("/api/sessions/{id}/stats", get(get_stats))
        .route("/api/sessions/{id}/trace", get(get_trace))
        .route("/api/sessions/{id}/config", put(put_config))
        .route("/api/sessions/{id}/goto", post(goto))
        .route("/api/sessions/{id}/step", post(step))
        .route("/api/sessions/{id}/next-event", post(next_event))
        .route("/api/sessions/{id}/prev-event", post(prev_event))
        .route("/api/sessions/{id}/run", post(run))
        .route("/api/sessions/{id}/reset", post(reset))
        .with_state(state);
    let app = match ui_dir {
        Some(dir) => {
            let index = dir.join("index.html");
            api.fallback_service(ServeDir::new(dir).fallback(ServeFile::new(index)))
        }
        None => api.route("/", get(placeholder_ui)),
    };
    app.layer(CorsLayer::permissive())
}

/// Serves until the task is dropped, evicting idle sessions once a minute.
pub async fn serve(listener: tokio::net::TcpListener, opts: Options) -> std::io::Result<()> {
    let state = Arc::new(AppState::new(&opts).map_err(std::io::Error::other)?);
    let evictor = state.clone();
    let period = opts.idle_timeout.min(Duration::from_secs(60));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            evictor.sessions.evict_idle();
        }
    });
    axum::serve(listener, router(state, opts.ui_dir)).await
}

/// Starts a server on its own runtime thread; returns the bound address.
/// Used by tests and embedders that are not async themselves.
pub fn spawn(addr: SocketAddr, opts: Options) -> std::io::Result<SocketAddr> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(2)
        .enable_all()
        .build()?;
    let listener = runtime.block_on(tokio::net::TcpListener::bind(addr))?;
    let bound = listener.local_addr()?;
    std::thread::spawn(move || {
        if let Err(e) = runtime.block_on(serve(listener, opts)) {
            eprintln!("server stopped: {e}");
        }
    });
    Ok(bound)
}

fn session(app: &AppState, id: &str) -> ApiResult<Arc<Session>> {
    app.sessions
        .get(id)
        .ok_or_else(|| ApiError::not_found(format!("unknown session '{id}'")))
}

fn document(tl: &Timeline) -> Json<StateDocument> {
    Json(StateDocument::from_timeline(tl))
}

#[derive(Serialize)]
struct CatalogEntry<'a> {
    name: &'a str,
    description: &'a str,
    events: usize,
}

async fn list_scenarios(State(app): Shared) -> impl IntoResponse {
    let entries: Vec<CatalogEntry> = app
        .catalog
        .iter()
        .map(|s| CatalogEntry {
            name: &s.name,
            description: &s.description,
            events: s.events.len(),
        })
        .collect();
    Json(serde_json::to_value(entries).expect("catalog serializes"))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    config: Option<Value>,
    scenario_name: Option<String>,
    scenario_text: Option<String>,
}

#[derive(Serialize)]
struct Created {
    session_id: String,
    state: StateDocument,
}

async fn create_session(
    State(app): Shared,
    body: axum::body::Bytes,
) -> ApiResult<(StatusCode, Json<Created>)> {
    let req: CreateSession = if body.iter().all(u8::is_ascii_whitespace) {
        CreateSession::default()
    } else {
        serde_json::from_slice(&body)
            .map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))?
    };
    let config = match req.config {
        Some(patch) => Config::default().with_overrides(&patch)?,
        None => Config::default(),
    };
    let scenario = match (req.scenario_name, req.scenario_text) {
        (Some(_), Some(_)) => {
            return Err(ApiError::bad_request(
                "give at most one of scenario_name and scenario_text",
            ))
        }
        (Some(name), None) => app
            .catalog
            .iter()
            .find(|s| s.name == name)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("unknown scenario '{name}'")))?,
        (None, Some(text)) => {
            scenario::parse_with_limit(&text, config.max_time).map_err(ApiError::diagnostics)?
        }
        (None, None) => Scenario::empty(),
    };
    let timeline = Timeline::new(config, scenario)?;
    let state = StateDocument::from_timeline(&timeline);
    let (session_id, _) = app.sessions.insert(timeline);
    Ok((StatusCode::CREATED, Json(Created { session_id, state })))
}

async fn get_state(State(app): Shared, Path(id): Path<String>) -> ApiResult<Json<StateDocument>> {
    let s = session(&app, &id)?;
    let tl = s.timeline.read().unwrap();
    Ok(document(&tl))
}

async fn get_stats(State(app): Shared, Path(id): Path<String>) -> ApiResult<Json<RunStats>> {
    let s = session(&app, &id)?;
    let tl = s.timeline.read().unwrap();
    Ok(Json(tl.stats()?))
}

#[derive(Deserialize)]
struct TraceWindow {
    from: Option<SimTime>,
    to: Option<SimTime>,
}

#[derive(Serialize)]
struct TracePage<'a> {
    from: SimTime,
    to: SimTime,
    records: &'a [TraceRecord],
}

async fn get_trace(
    State(app): Shared,
    Path(id): Path<String>,
    window: Result<Query<TraceWindow>, QueryRejection>,
) -> ApiResult<impl IntoResponse> {
    let Query(window) = window?;
    let s = session(&app, &id)?;
    let tl = s.timeline.read().unwrap();
    let from = window.from.unwrap_or(0);
    let to = window.to.unwrap_or(tl.now());
    if from > to {
        return Err(ApiError::bad_request(format!(
            "empty window: from {from} > to {to}"
        )));
    }
    let trace = &tl.current().trace;
    let lo = trace.partition_point(|r| r.time < from);
    let hi = trace.partition_point(|r| r.time <= to);
    let page = TracePage {
        from,
        to,
        records: &trace[lo..hi],
    };
    Ok(Json(serde_json::to_value(page).expect("trace serializes")))
}

async fn put_config(
    State(app): Shared,
    Path(id): Path<String>,
    body: Result<Json<Value>, JsonRejection>,
) -> ApiResult<Json<StateDocument>> {
    let Json(patch) = body?;
    let s = session(&app, &id)?;
    let mut tl = s.timeline.write().unwrap();
    let config = tl.config().with_overrides(&patch)?;
    *tl = Timeline::new(config, tl.scenario().clone())?;
    Ok(document(&tl))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GotoBody {
    t: i64,
}

async fn goto(
    State(app): Shared,
    Path(id): Path<String>,
    body: Result<Json<GotoBody>, JsonRejection>,
) -> ApiResult<Json<StateDocument>> {
    let Json(GotoBody { t }) = body?;
    let s = session(&app, &id)?;
    let mut tl = s.timeline.write().unwrap();
    let max = tl.config().max_time;
    let t = SimTime::try_from(t)
        .ok()
        .filter(|t| *t <= max)
        .ok_or_else(|| ApiError::bad_request(format!("time {t} is outside 0..{max}")))?;
    tl.goto(t)?;
    Ok(document(&tl))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepBody {
    dt: i64,
}

#[derive(Serialize)]
struct Stepped {
    #[serde(flatten)]
    state: StateDocument,
    clamped: bool,
}

async fn step(
    State(app): Shared,
    Path(id): Path<String>,
    body: Result<Json<StepBody>, JsonRejection>,
) -> ApiResult<Json<Stepped>> {
    let Json(StepBody { dt }) = body?;
    if dt.abs() > MAX_STEP {
        return Err(ApiError::bad_request(format!(
            "dt {dt} is outside -{MAX_STEP}..{MAX_STEP}"
        )));
    }
    let s = session(&app, &id)?;
    let mut tl = s.timeline.write().unwrap();
    let clamped = tl.step(dt)?;
    Ok(Json(Stepped {
        state: StateDocument::from_timeline(&tl),
        clamped,
    }))
}

async fn next_event(State(app): Shared, Path(id): Path<String>) -> ApiResult<Json<StateDocument>> {
    let s = session(&app, &id)?;
    let mut tl = s.timeline.write().unwrap();
    tl.next_event()?;
    Ok(document(&tl))
}

async fn prev_event(State(app): Shared, Path(id): Path<String>) -> ApiResult<Json<StateDocument>> {
    let s = session(&app, &id)?;
    let mut tl = s.timeline.write().unwrap();
    tl.prev_event()?;
    Ok(document(&tl))
}

#[derive(Serialize)]
struct Completed {
    #[serde(flatten)]
    state: StateDocument,
    stats: RunStats,
}

async fn run(State(app): Shared, Path(id): Path<String>) -> ApiResult<Json<Completed>> {
    let s = session(&app, &id)?;
    let mut tl = s.timeline.write().unwrap();
    let stats = tl.complete_run()?;
    Ok(Json(Completed {
        state: StateDocument::from_timeline(&tl),
        stats,
    }))
}

async fn reset(State(app): Shared, Path(id): Path<String>) -> ApiResult<Json<StateDocument>> {
    let s = session(&app, &id)?;
    let mut tl = s.timeline.write().unwrap();
    tl.reset();
    Ok(document(&tl))
}

async fn placeholder_ui() -> Html<&'static str> {
    Html(include_str!("placeholder.html"))
}
