//! JSON-over-HTTP access to sweeps and closed-form statistics.
//!
//! Sweeps run synchronously on the blocking pool, at most `max_concurrent`
//! at a time; results are cached by a hash of the fully defaulted plan.

use std::collections::{HashMap, VecDeque};
use std::future::Future;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fundsim_core::distributions::closed_form_stats;
use fundsim_core::experiments::{preset, run_sweep, SweepPlan, PRESETS};
use fundsim_core::{PowerLawParams, ENGINE_VERSION};
use log::{info, warn};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};
use tokio::net::TcpListener;
use tokio::sync::Semaphore;
use tower_http::cors::CorsLayer;

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
pub const DEFAULT_MAX_CELLS: usize = 500;
pub const DEFAULT_MAX_CONCURRENT: usize = 2;
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(300);
pub const DEFAULT_CACHE_ENTRIES: usize = 256;
/// Seconds a client should wait after a 503.
const RETRY_AFTER_SECS: u64 = 5;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Largest accepted grid, in grid points.
    pub max_cells: usize,
    /// Sweeps allowed to run at once.
    pub max_concurrent: usize,
    /// Wall-clock limit for one request.
    pub time_budget: Duration,
    pub cache_entries: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            max_cells: DEFAULT_MAX_CELLS,
            max_concurrent: DEFAULT_MAX_CONCURRENT,
            time_budget: DEFAULT_TIME_BUDGET,
            cache_entries: DEFAULT_CACHE_ENTRIES,
        }
    }
}

type Entries = (HashMap<String, Arc<str>>, VecDeque<String>);

/// Bounded map from plan hash to serialized result; oldest entries go first.
struct ResultCache {
    capacity: usize,
    inner: Mutex<Entries>,
}

impl ResultCache {
    fn new(capacity: usize) -> Self {
        Self {
            capacity,
            inner: Mutex::new((HashMap::new(), VecDeque::new())),
        }
    }

    fn get(&self, key: &str) -> Option<Arc<str>> {
        self.inner.lock().unwrap().0.get(key).cloned()
    }

    fn insert(&self, key: String, value: Arc<str>) {
        if self.capacity == 0 {
            return;
        }
        let mut guard = self.inner.lock().unwrap();
        let (map, order) = &mut *guard;
        if map.insert(key.clone(), value).is_none() {
            order.push_back(key);
        }
        while order.len() > self.capacity {
            if let Some(old) = order.pop_front() {
                map.remove(&old);
            }
        }
    }
}

pub struct AppState {
    config: ServiceConfig,
    permits: Arc<Semaphore>,
    cache: ResultCache,
    draining: AtomicBool,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        Arc::new(Self {
            permits: Arc::new(Semaphore::new(config.max_concurrent)),
            cache: ResultCache::new(config.cache_entries),
            draining: AtomicBool::new(false),
            config,
        })
    }

    /// Health checks report 503 from now on.
    pub fn start_draining(&self) {
        self.draining.store(true, Ordering::SeqCst);
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimRequest {
    #[serde(default)]
    plan: SweepPlan,
    #[serde(default = "yes")]
    cache: bool,
}

fn yes() -> bool {
    true
}

#[derive(Serialize)]
struct SimResponse<'a> {
    result: &'a RawValue,
    elapsed_ms: u64,
    cache_hit: bool,
    engine_version: &'static str,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatsRequest {
    alpha: f64,
    x_min: f64,
    #[serde(default)]
    k: Option<u32>,
}

/// Moment order reported when a request does not name one.
pub const DEFAULT_MOMENT_ORDER: u32 = 2;

#[derive(Serialize)]
struct PresetEntry {
    name: &'static str,
    description: &'static str,
    plan: SweepPlan,
}

fn error(status: StatusCode, msg: impl Into<String>) -> Response {
    (status, Json(serde_json::json!({ "error": msg.into() }))).into_response()
}

/// Cache key: SHA-256 over the engine version and the canonical plan JSON.
pub fn plan_key(plan: &SweepPlan) -> String {
    let canonical = serde_json::to_string(plan).expect("plans serialize");
    let mut h = Sha256::new();
    h.update(ENGINE_VERSION.as_bytes());
    h.update([0]);
    h.update(canonical.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn sim_response(result: &str, started: Instant, cache_hit: bool) -> Response {
    let raw: &RawValue = serde_json::from_str(result).expect("cached results are JSON");
    let body = SimResponse {
        result: raw,
        elapsed_ms: started.elapsed().as_millis() as u64,
        cache_hit,
        engine_version: ENGINE_VERSION,
    };
    Json(body).into_response()
}

async fn simulate(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let started = Instant::now();
    let req: SimRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid request: {e}")),
    };
    if let Err(e) = req.plan.validate() {
        return error(StatusCode::BAD_REQUEST, e.to_string());
    }
    let cells = req.plan.grid_size();
    if cells > state.config.max_cells {
        return error(
            StatusCode::PAYLOAD_TOO_LARGE,
            format!(
                "plan expands to {cells} grid points; this server accepts at most {}",
                state.config.max_cells
            ),
        );
    }

    let key = plan_key(&req.plan);
    if req.cache {
        if let Some(hit) = state.cache.get(&key) {
            return sim_response(&hit, started, true);
        }
    }

    let Ok(permit) = state.permits.clone().try_acquire_owned() else {
        let mut resp = error(
            StatusCode::SERVICE_UNAVAILABLE,
            format!("all {} simulation slots are busy", state.config.max_concurrent),
        );
        resp.headers_mut()
            .insert(header::RETRY_AFTER, RETRY_AFTER_SECS.into());
        return resp;
    };
    let plan = req.plan;
    // The permit travels with the job, so a timed-out sweep still counts
    // against the budget until it actually finishes.
    let job = tokio::task::spawn_blocking(move || {
        let _permit = permit;
        run_sweep(&plan)
            .map_err(|e| e.to_string())
            .and_then(|r| serde_json::to_string(&r).map_err(|e| e.to_string()))
    });
    match tokio::time::timeout(state.config.time_budget, job).await {
        Err(_) => {
            warn!("simulation exceeded the {:?} budget", state.config.time_budget);
            error(
                StatusCode::GATEWAY_TIMEOUT,
                format!(
                    "simulation exceeded the {} s time budget",
                    state.config.time_budget.as_secs_f64()
                ),
            )
        }
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("simulation aborted: {e}")),
        Ok(Ok(Err(e))) => error(StatusCode::INTERNAL_SERVER_ERROR, e),
        Ok(Ok(Ok(json))) => {
            let json: Arc<str> = json.into();
            if req.cache {
                state.cache.insert(key, json.clone());
            }
            info!("simulated {cells} grid points in {:?}", started.elapsed());
            sim_response(&json, started, false)
        }
    }
}

async fn stats(body: Bytes) -> Response {
    let req: StatsRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid request: {e}")),
    };
    match PowerLawParams::new(req.alpha, req.x_min) {
        Ok(p) => Json(closed_form_stats(p, req.k.unwrap_or(DEFAULT_MOMENT_ORDER))).into_response(),
        Err(e) => error(StatusCode::BAD_REQUEST, e.to_string()),
    }
}

async fn presets() -> Json<Vec<PresetEntry>> {
    Json(
        PRESETS
            .iter()
            .map(|&(name, description)| PresetEntry {
                name,
                description,
                plan: preset(name).expect("listed presets resolve"),
            })
            .collect(),
    )
}

async fn health(State(state): State<Arc<AppState>>) -> Response {
    let (status, label) = if state.draining.load(Ordering::SeqCst) {
        (StatusCode::SERVICE_UNAVAILABLE, "draining")
    } else {
        (StatusCode::OK, "ok")
    };
    (
        status,
        Json(serde_json::json!({ "status": label, "engine_version": ENGINE_VERSION })),
    )
        .into_response()
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/v1/simulate", post(simulate))
        .route("/api/v1/stats", post(stats))
        .route("/api/v1/presets", get(presets))
        .route("/api/v1/health", get(health))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Serves until `shutdown` resolves, then stops accepting connections and
/// waits for in-flight requests to finish.
pub async fn serve(
    listener: TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let app = router(state.clone());
    axum::serve(listener, app)
        .with_graceful_shutdown(async move {
            shutdown.await;
            state.start_draining();
            info!("shutting down, draining in-flight requests");
        })
        .await
}

/// Resolves on Ctrl-C or, on Unix, SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
