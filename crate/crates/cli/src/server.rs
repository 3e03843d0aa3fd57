//! JSON API over one shared session: a current graph and at most one
//! evolution run.
//!
//! Steps execute on the blocking pool with the runner checked out of the
//! session, so state queries never wait for a step to finish.

use std::sync::{Arc, Mutex};

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use qgraph::evolution::{RunConfig, RunLog, RunStatus, Runner};
use qgraph::export::plot_csv;
use qgraph::goals::Goal;
use qgraph::io::graph_from_json;
use qgraph::secular::{plot_samples, SecularEvaluator};
use qgraph::spectrum::ModeChoice;
use qgraph::{Error, MetricGraph, ParameterBinding};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::commands::{spectrum, spectrum_json, SpectrumRequest};
use crate::prepare_graph;

const MAX_PLOT_SAMPLES: usize = 20_000;

pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(m: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, message: m.into() }
    }

    fn conflict(m: impl Into<String>) -> Self {
        ApiError { status: StatusCode::CONFLICT, message: m.into() }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::RefinementFailure { .. }
            | Error::DegenerateLeadingCoefficient { .. }
            | Error::NoConvergence(_)
            | Error::AllCandidatesFailed(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError { status, message: e.to_string() }
    }
}

impl From<crate::commands::CliError> for ApiError {
    fn from(e: crate::commands::CliError) -> Self {
        ApiError::bad_request(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": self.message}))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Parses a request body; malformed JSON becomes a 400 with a JSON error.
fn parse_body<T: serde::de::DeserializeOwned>(body: &str) -> ApiResult<T> {
    serde_json::from_str(body)
        .map_err(|e| ApiError::bad_request(format!("line {}, column {}: {e}", e.line(), e.column())))
}

struct RunSlot {
    /// `None` while a step is executing.
    runner: Option<Runner>,
    snapshot: RunLog,
    autorun: bool,
    stopped: bool,
}

pub struct Session {
    graph: MetricGraph,
    run: Option<RunSlot>,
}

pub type SharedSession = Arc<Mutex<Session>>;

pub fn new_session(graph: MetricGraph) -> SharedSession {
    Arc::new(Mutex::new(Session { graph, run: None }))
}

pub fn router(session: SharedSession) -> Router {
    Router::new()
        .route("/api/graph", get(get_graph).put(put_graph))
        .route("/api/dk", get(get_dk))
        .route("/api/spectrum", post(post_spectrum))
        .route("/api/run", post(post_run))
        .route("/api/run/state", get(get_state))
        .route("/api/run/goal", put(put_goal))
        .route("/api/run/step", post(post_step))
        .route("/api/run/pause", post(post_pause))
        .route("/api/run/resume", post(post_resume))
        .route("/api/run/stop", post(post_stop))
        .fallback(|| async { ApiError { status: StatusCode::NOT_FOUND, message: "no such endpoint".into() } })
        .with_state(session)
}

pub async fn serve(host: &str, port: u16, session: SharedSession) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(session)).await
}

fn lock(s: &SharedSession) -> std::sync::MutexGuard<'_, Session> {
    s.lock().unwrap_or_else(|p| p.into_inner())
}

async fn get_graph(State(s): State<SharedSession>) -> Json<Value> {
    let g = lock(&s).graph.clone();
    Json(qgraph::io::graph_to_value(&g))
}

async fn put_graph(State(s): State<SharedSession>, body: String) -> ApiResult<Json<Value>> {
    let g = graph_from_json(&body)?;
    // Structure only; symbolic lengths are bound per request.
    let structural = g.bind(&full_binding(&g))?;
    structural.ensure_valid()?;
    lock(&s).graph = g.clone();
    Ok(Json(qgraph::io::graph_to_value(&g)))
}

/// Binds every parameter to one so that structural checks can run.
fn full_binding(g: &MetricGraph) -> ParameterBinding {
    g.parameters().into_iter().fold(ParameterBinding::new(), |b, p| b.with(p, 1.0))
}

#[derive(Deserialize)]
struct DkQuery {
    #[serde(default)]
    bind: String,
    k0: f64,
    k1: f64,
    n: usize,
    #[serde(default)]
    format: Option<String>,
}

async fn get_dk(State(s): State<SharedSession>, q: Result<Query<DkQuery>, axum::extract::rejection::QueryRejection>) -> ApiResult<Response> {
    let Query(q) = q.map_err(|e| ApiError::bad_request(e.body_text()))?;
    if !(q.k1 > q.k0) || q.n < 1 || q.n > MAX_PLOT_SAMPLES {
        return Err(ApiError::bad_request(format!("need k0 < k1 and 1 <= n <= {MAX_PLOT_SAMPLES}")));
    }
    let binding = ParameterBinding::parse(&q.bind)?;
    let graph = lock(&s).graph.clone();
    let samples = tokio::task::spawn_blocking(move || -> ApiResult<_> {
        let g = prepare_graph(&graph, &binding, true)?;
        let ev = SecularEvaluator::new(&g)?;
        Ok(plot_samples(&ev, q.k0, q.k1, q.n))
    })
    .await
    .map_err(|e| ApiError::bad_request(e.to_string()))??;
    if q.format.as_deref() == Some("csv") {
        return Ok(([(header::CONTENT_TYPE, "text/csv")], plot_csv(&samples)).into_response());
    }
    Ok(Json(json!({
        "k": samples.iter().map(|p| p.k).collect::<Vec<_>>(),
        "sigma_min": samples.iter().map(|p| p.sigma_min).collect::<Vec<_>>(),
        "re_det": samples.iter().map(|p| p.det.re).collect::<Vec<_>>(),
        "im_det": samples.iter().map(|p| p.det.im).collect::<Vec<_>>(),
    }))
    .into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumBody {
    #[serde(default)]
    graph: Option<MetricGraph>,
    #[serde(default)]
    bind: Option<String>,
    #[serde(default)]
    k_max: Option<f64>,
    #[serde(default)]
    count: Option<usize>,
    #[serde(default)]
    mode: ModeChoice,
}

async fn post_spectrum(State(s): State<SharedSession>, body: String) -> ApiResult<Json<Value>> {
    let body: SpectrumBody = if body.trim().is_empty() { parse_body("{}")? } else { parse_body(&body)? };
    let graph = body.graph.unwrap_or_else(|| lock(&s).graph.clone());
    let req = SpectrumRequest {
        binding: ParameterBinding::parse(body.bind.as_deref().unwrap_or(""))?,
        k_max: body.k_max,
        count: body.count,
        mode: body.mode,
    };
    let spec = tokio::task::spawn_blocking(move || spectrum(&graph, &req))
        .await
        .map_err(|e| ApiError::bad_request(e.to_string()))??;
    Ok(Json(spectrum_json(&spec)))
}

#[derive(Deserialize)]
struct RunQuery {
    #[serde(default)]
    paused: bool,
}

async fn post_run(State(s): State<SharedSession>, Query(q): Query<RunQuery>, body: String) -> ApiResult<Json<Value>> {
    let cfg: RunConfig = parse_body(&body)?;
    {
        let session = lock(&s);
        if let Some(slot) = &session.run {
            if slot.runner.is_none() || slot.snapshot.status == RunStatus::Running {
                return Err(ApiError::conflict("a run is already active; stop it first"));
            }
        }
    }
    let runner = tokio::task::spawn_blocking(move || Runner::new(cfg))
        .await
        .map_err(|e| ApiError::bad_request(e.to_string()))??;
    let state = {
        let mut session = lock(&s);
        if session.run.as_ref().is_some_and(|r| r.runner.is_none() || r.snapshot.status == RunStatus::Running) {
            return Err(ApiError::conflict("a run is already active; stop it first"));
        }
        let snapshot = runner.log().clone();
        session.run = Some(RunSlot { runner: Some(runner), snapshot, autorun: !q.paused, stopped: false });
        state_json(session.run.as_ref().expect("just set"), 0)
    };
    if !q.paused {
        tokio::spawn(drive(s.clone()));
    }
    Ok(Json(state))
}

/// Advances the run until it finishes, is paused or is stopped.
async fn drive(s: SharedSession) {
    while let Some(r) = take_runner(&s, true) {
        if step_and_return(&s, r).await.is_err() {
            break;
        }
    }
}

/// Checks the runner out of the session if it can step.
fn take_runner(s: &SharedSession, require_autorun: bool) -> Option<Runner> {
    let mut session = lock(s);
    let slot = session.run.as_mut()?;
    if (require_autorun && !slot.autorun) || slot.snapshot.status != RunStatus::Running {
        return None;
    }
    slot.runner.take()
}

async fn step_and_return(s: &SharedSession, mut runner: Runner) -> Result<(), String> {
    let (runner, outcome) = tokio::task::spawn_blocking(move || {
        let outcome = runner.step().map(|_| ()).map_err(|e| e.to_string());
        (runner, outcome)
    })
    .await
    .map_err(|e| e.to_string())?;
    let mut session = lock(s);
    let mut runner = runner;
    if let Some(slot) = session.run.as_mut() {
        if slot.stopped {
            runner.stop();
        }
        slot.snapshot = runner.log().clone();
        slot.runner = Some(runner);
    }
    outcome
}

#[derive(Deserialize)]
struct StateQuery {
    #[serde(default)]
    since: usize,
}

fn state_json(slot: &RunSlot, since: usize) -> Value {
    let log = &slot.snapshot;
    let phase = log.steps.last().map_or(0, |s| s.phase);
    json!({
        "status": log.status,
        "busy": slot.runner.is_none(),
        "autorun": slot.autorun,
        "total_steps": log.steps.len(),
        "max_steps": log.config.steps,
        "phase": phase,
        "phase_starts": log.phase_starts(),
        "initial": log.initial,
        "current": log.final_graph(),
        "since": since,
        "steps": log.steps.get(since..).unwrap_or(&[]),
    })
}

async fn get_state(State(s): State<SharedSession>, Query(q): Query<StateQuery>) -> ApiResult<Json<Value>> {
    let session = lock(&s);
    let slot = session.run.as_ref().ok_or_else(|| ApiError::conflict("no run has been started"))?;
    Ok(Json(state_json(slot, q.since)))
}

/// Runs `f` on the idle runner; conflicts if a step is executing.
fn with_idle_runner<T>(s: &SharedSession, f: impl FnOnce(&mut Runner) -> ApiResult<T>) -> ApiResult<(T, Value)> {
    let mut session = lock(s);
    let slot = session.run.as_mut().ok_or_else(|| ApiError::conflict("no run has been started"))?;
    let runner = slot.runner.as_mut().ok_or_else(|| ApiError::conflict("a step is executing; retry"))?;
    let out = f(runner)?;
    slot.snapshot = runner.log().clone();
    Ok((out, state_json(slot, usize::MAX)))
}

async fn put_goal(State(s): State<SharedSession>, body: String) -> ApiResult<Json<Value>> {
    let goal: Goal = parse_body(&body)?;
    let (_, state) = with_idle_runner(&s, |r| {
        if r.is_finished() {
            return Err(ApiError::conflict("run has finished"));
        }
        r.set_goal(goal).map_err(ApiError::from)
    })?;
    Ok(Json(state))
}

async fn post_step(State(s): State<SharedSession>) -> ApiResult<Json<Value>> {
    {
        let session = lock(&s);
        let slot = session.run.as_ref().ok_or_else(|| ApiError::conflict("no run has been started"))?;
        if slot.autorun {
            return Err(ApiError::conflict("run is advancing automatically; pause it first"));
        }
        if slot.snapshot.status != RunStatus::Running {
            return Err(ApiError::conflict("run has finished"));
        }
    }
    let runner = take_runner(&s, false).ok_or_else(|| ApiError::conflict("a step is executing; retry"))?;
    let before = lock(&s).run.as_ref().map_or(0, |r| r.snapshot.steps.len());
    step_and_return(&s, runner).await.map_err(|e| ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, message: e })?;
    let session = lock(&s);
    Ok(Json(state_json(session.run.as_ref().expect("run exists"), before)))
}

async fn post_pause(State(s): State<SharedSession>) -> ApiResult<Json<Value>> {
    let mut session = lock(&s);
    let slot = session.run.as_mut().ok_or_else(|| ApiError::conflict("no run has been started"))?;
    slot.autorun = false;
    Ok(Json(state_json(slot, usize::MAX)))
}

async fn post_resume(State(s): State<SharedSession>) -> ApiResult<Json<Value>> {
    let state = {
        let mut session = lock(&s);
        let slot = session.run.as_mut().ok_or_else(|| ApiError::conflict("no run has been started"))?;
        if slot.snapshot.status != RunStatus::Running {
            return Err(ApiError::conflict("run has finished"));
        }
        if slot.autorun {
            return Err(ApiError::conflict("run is already advancing"));
        }
        slot.autorun = true;
        state_json(slot, usize::MAX)
    };
    tokio::spawn(drive(s.clone()));
    Ok(Json(state))
}

async fn post_stop(State(s): State<SharedSession>) -> ApiResult<Json<Value>> {
    let mut session = lock(&s);
    let slot = session.run.as_mut().ok_or_else(|| ApiError::conflict("no run has been started"))?;
    slot.autorun = false;
    slot.stopped = true;
    // A step in flight still completes and is kept; the runner is stopped
    // when it is checked back in.
    if let Some(r) = slot.runner.as_mut() {
        r.stop();
        slot.snapshot = r.log().clone();
    }
    Ok(Json(state_json(slot, usize::MAX)))
}
