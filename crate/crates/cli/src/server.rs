//! The stateless HTTP JSON service.

use std::time::Duration;

use axum::extract::rejection::QueryRejection;
use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Deserialize;
use tilepump_core::api::{self, AnalysisRequest, ApiError, Command, ErrorBody, RenderRequest};
use tilepump_core::engine::{AlgoState, ConcludeLimits};
use tilepump_core::instance::InstanceFile;
use tilepump_core::visibility::Side;

/// Extra wall-clock time granted beyond the analysis budget before a request is abandoned.
const GRACE: Duration = Duration::from_millis(500);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ServeConfig {
    pub max_body_bytes: usize,
    /// Per-request analysis budget; requests may ask for less, never more.
    pub budget_ms: Option<u64>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig { max_body_bytes: 1 << 20, budget_ms: None }
    }
}

impl ServeConfig {
    fn cap(&self, limits: &mut ConcludeLimits) {
        limits.budget_ms = crate::min_budget(limits.budget_ms, self.budget_ms);
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRequest {
    instance: InstanceFile,
    #[serde(default)]
    hand: Option<Side>,
    #[serde(default)]
    i: Option<usize>,
    #[serde(default)]
    j: Option<usize>,
    #[serde(default)]
    state: Option<AlgoState>,
    #[serde(default)]
    limits: ConcludeLimits,
}

#[derive(Debug, Deserialize)]
struct BoundsQuery {
    tiles: u64,
    seed: u64,
}

fn error(e: &ApiError) -> Response {
    let status = StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, json(&e.body())).into_response()
}

fn json<T: serde::Serialize>(value: &T) -> ([(header::HeaderName, &'static str); 1], String) {
    ([(header::CONTENT_TYPE, "application/json")], serde_json::to_string(value).expect("responses serialize"))
}

/// Runs `work` off the async runtime, abandoning it once the budget and grace period pass.
async fn compute<T: Send + 'static>(
    budget_ms: Option<u64>,
    work: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    let task = tokio::task::spawn_blocking(work);
    let joined = match budget_ms {
        Some(ms) => match tokio::time::timeout(Duration::from_millis(ms) + GRACE, task).await {
            Ok(joined) => joined,
            Err(_) => return Err(ApiError::Budget { budget_ms: ms }),
        },
        None => task.await,
    };
    joined.unwrap_or_else(|e| Err(ApiError::Precondition(format!("analysis panicked: {e}"))))
}

async fn analyze(State(config): State<ServeConfig>, body: String) -> Response {
    let mut request: AnalysisRequest = match api::parse_json(&body) {
        Ok(r) => r,
        Err(e) => return error(&e),
    };
    config.cap(&mut request.limits);
    match compute(request.limits.budget_ms, move || api::handle(&request)).await {
        Ok(r) => json(&r).into_response(),
        Err(e) => error(&e),
    }
}

async fn step(State(config): State<ServeConfig>, body: String) -> Response {
    let s: StepRequest = match api::parse_json(&body) {
        Ok(r) => r,
        Err(e) => return error(&e),
    };
    let mut request = AnalysisRequest {
        instance: s.instance,
        command: Command::Step { hand: s.hand, i: s.i, j: s.j, state: s.state },
        limits: s.limits,
    };
    config.cap(&mut request.limits);
    match compute(request.limits.budget_ms, move || api::handle(&request)).await {
        Ok(r) => json(&r).into_response(),
        Err(e) => error(&e),
    }
}

async fn render(State(config): State<ServeConfig>, body: String) -> Response {
    let mut request: RenderRequest = match api::parse_json(&body) {
        Ok(r) => r,
        Err(e) => return error(&e),
    };
    config.cap(&mut request.limits);
    match compute(request.limits.budget_ms, move || api::render(&request)).await {
        Ok(svg) => ([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response(),
        Err(e) => error(&e),
    }
}

async fn bounds(query: Result<Query<BoundsQuery>, QueryRejection>) -> Response {
    match query {
        Ok(Query(q)) => json(&api::bounds(q.tiles, q.seed)).into_response(),
        Err(e) => {
            let body = ErrorBody { error: "query".into(), message: e.body_text(), field: None };
            (StatusCode::BAD_REQUEST, json(&body)).into_response()
        }
    }
}

async fn health() -> &'static str {
    "ok"
}

pub fn router(config: ServeConfig) -> Router {
    Router::new()
        .route("/api/v1/analyze", post(analyze))
        .route("/api/v1/step", post(step))
        .route("/api/v1/render", post(render))
        .route("/api/v1/bounds", get(bounds))
        .route("/api/v1/health", get(health))
        .layer(DefaultBodyLimit::max(config.max_body_bytes))
        .with_state(config)
}

pub async fn serve(port: u16, config: ServeConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    axum::serve(listener, router(config)).await
}
