//! HTTP endpoint over a loaded graph: area briefings, comparisons, queries,
//! grid tiles and dataset listings, as JSON.
//!
//! The store is an immutable snapshot; `POST /admin/reload` rebuilds it from
//! its source and swaps it in, so in-flight requests finish on the old one.

use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use gridkg_core::briefing::{self, BriefingError, TargetRef, TimeWindow};
use gridkg_core::dgg::{cells_geojson, cover_geometry, CellId, DggError, MAX_LEVEL};
use gridkg_core::fixture;
use gridkg_core::geometry::{Geometry, Polygon};
use gridkg_core::ingest::{build_graph, load_run, IngestError, RunConfig};
use gridkg_core::kgmodel::ModelError;
use gridkg_core::query::{run_query, QueryError};
use gridkg_core::store::Store;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

/// Largest number of cells `/cells` will return.
pub const MAX_CELLS: usize = 20_000;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Briefing(#[from] BriefingError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("no graph source to reload from")]
    NoSource,
    #[error("internal: {0}")]
    Internal(String),
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Query(e) if e.is_unsupported() => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Query(_) => StatusCode::BAD_REQUEST,
            ServiceError::Briefing(BriefingError::NotFound(_)) => StatusCode::NOT_FOUND,
            ServiceError::Briefing(_) => StatusCode::BAD_REQUEST,
            ServiceError::NoSource => StatusCode::CONFLICT,
            ServiceError::Load(_) | ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let mut body = json!({ "error": self.to_string() });
        if let ServiceError::Query(QueryError::Unsupported { token, line, col }) = &self {
            body["token"] = json!(token);
            body["line"] = json!(line);
            body["col"] = json!(col);
        }
        (status, Json(body)).into_response()
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Where the served graph comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSource {
    /// An N-Triples file.
    NTriples(PathBuf),
    /// A run config, ingested on load.
    Run { config: PathBuf, level: Option<u8> },
    /// The built-in demonstration fixture.
    Fixture,
}

impl GraphSource {
    pub fn load(&self) -> Result<Store, LoadError> {
        match self {
            GraphSource::NTriples(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
                Ok(Store::from_ntriples(&text)?)
            }
            GraphSource::Run { config, level } => {
                let cfg = RunConfig::from_file(config)?;
                let base = config.parent().map(PathBuf::from).unwrap_or_default();
                let outputs = load_run(&cfg, &base, *level)?;
                Ok(Store::from_triples(&build_graph(&outputs, &cfg.themes)?))
            }
            GraphSource::Fixture => Ok(fixture::store()?),
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    store: Arc<RwLock<Arc<Store>>>,
    source: Option<GraphSource>,
}

impl AppState {
    pub fn new(store: Store, source: Option<GraphSource>) -> Self {
        AppState { store: Arc::new(RwLock::new(Arc::new(store))), source }
    }

    pub fn from_source(source: GraphSource) -> Result<Self, LoadError> {
        Ok(AppState::new(source.load()?, Some(source)))
    }

    pub fn snapshot(&self) -> Arc<Store> {
        Arc::clone(&self.store.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Rebuild the store from its source and swap it in; returns the new
    /// triple count.
    pub fn reload(&self) -> Result<usize, ServiceError> {
        let source = self.source.as_ref().ok_or(ServiceError::NoSource)?;
        let fresh = Arc::new(source.load()?);
        let n = fresh.len();
        *self.store.write().unwrap_or_else(|e| e.into_inner()) = fresh;
        Ok(n)
    }
}

/// All routes. `cors_origin` restricts cross-origin access to one origin;
/// `None` allows any.
pub fn router(state: AppState, cors_origin: Option<&str>) -> Result<Router, ServiceError> {
    let origin = match cors_origin {
        Some(o) => AllowOrigin::exact(
            HeaderValue::from_str(o).map_err(|_| ServiceError::BadRequest(format!("bad CORS origin {o:?}")))?,
        ),
        None => AllowOrigin::from(Any),
    };
    let cors = CorsLayer::new().allow_origin(origin).allow_methods(Any).allow_headers(Any);
    Ok(Router::new()
        .route("/health", get(health))
        .route("/query", post(query))
        .route("/briefing", get(briefing_handler))
        .route("/compare", get(compare_handler))
        .route("/cells", get(cells))
        .route("/datasets", get(datasets))
        .route("/admin/reload", post(reload))
        .layer(cors)
        .with_state(state))
}

/// Bind `addr` and serve until Ctrl-C.
pub async fn serve(state: AppState, addr: SocketAddr, cors_origin: Option<&str>) -> Result<(), ServiceError> {
    let app = router(state, cors_origin)?;
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| ServiceError::Internal(format!("bind {addr}: {e}")))?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ServiceError::Internal(e.to_string()))
}

/// Run CPU-bound work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ServiceError::Internal(e.to_string()))?
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<Json<Value>, ServiceError> {
    serde_json::to_value(v).map(Json).map_err(|e| ServiceError::Internal(e.to_string()))
}

async fn health(State(state): State<AppState>) -> Json<Value> {
    Json(json!({ "status": "ok", "triples": state.snapshot().len() }))
}

#[derive(Debug, Deserialize)]
struct QueryParams {
    format: Option<String>,
}

async fn query(State(state): State<AppState>, Query(params): Query<QueryParams>, body: Bytes) -> Result<Response, ServiceError> {
    let text = String::from_utf8(body.to_vec()).map_err(|_| ServiceError::BadRequest("query body is not UTF-8".into()))?;
    if text.trim().is_empty() {
        return Err(ServiceError::BadRequest("empty query".into()));
    }
    let store = state.snapshot();
    let result = blocking(move || Ok(run_query(&text, &store)?)).await?;
    match params.format.as_deref() {
        None | Some("json") => Ok(Json(result.to_json()).into_response()),
        Some("tsv") => Ok(([(header::CONTENT_TYPE, "text/tab-separated-values; charset=utf-8")], result.to_tsv()).into_response()),
        Some(other) => Err(ServiceError::BadRequest(format!("unknown format {other:?}; use json or tsv"))),
    }
}

#[derive(Debug, Deserialize)]
struct BriefingParams {
    cell: Option<String>,
    region: Option<String>,
    from: Option<String>,
    to: Option<String>,
}

async fn briefing_handler(State(state): State<AppState>, Query(p): Query<BriefingParams>) -> Result<Json<Value>, ServiceError> {
    let target = match (p.cell, p.region) {
        (Some(c), None) => TargetRef::Cell(c),
        (None, Some(r)) => TargetRef::Feature(r),
        _ => return Err(ServiceError::BadRequest("give exactly one of cell= or region=".into())),
    };
    let window = TimeWindow::parse(p.from.as_deref(), p.to.as_deref())?;
    let store = state.snapshot();
    blocking(move || to_json(&briefing::briefing(&store, &target, window)?)).await
}

/// A cell token if it parses as one, otherwise a feature reference.
pub fn parse_target(s: &str) -> TargetRef {
    match CellId::from_token(s) {
        Ok(_) => TargetRef::Cell(s.to_string()),
        Err(_) => TargetRef::Feature(s.to_string()),
    }
}

#[derive(Debug, Deserialize)]
struct CompareParams {
    a: Option<String>,
    b: Option<String>,
}

async fn compare_handler(State(state): State<AppState>, Query(p): Query<CompareParams>) -> Result<Json<Value>, ServiceError> {
    let (Some(a), Some(b)) = (p.a, p.b) else {
        return Err(ServiceError::BadRequest("compare needs a= and b=".into()));
    };
    let store = state.snapshot();
    blocking(move || to_json(&briefing::compare(&store, &parse_target(&a), &parse_target(&b))?)).await
}

#[derive(Debug, Deserialize)]
struct CellsParams {
    bbox: Option<String>,
    level: Option<String>,
}

/// Parse `minlng,minlat,maxlng,maxlat`.
pub fn parse_bbox(s: &str) -> Result<[f64; 4], ServiceError> {
    let bad = || ServiceError::BadRequest(format!("bbox {s:?} is not minlng,minlat,maxlng,maxlat"));
    let v: Vec<f64> = s.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let [x0, y0, x1, y1] = <[f64; 4]>::try_from(v).map_err(|_| bad())?;
    let ok = x0 < x1 && y0 < y1 && x0 >= -180.0 && x1 <= 180.0 && y0 >= -90.0 && y1 <= 90.0;
    if !ok {
        return Err(bad());
    }
    Ok([x0, y0, x1, y1])
}

async fn cells(Query(p): Query<CellsParams>) -> Result<Json<Value>, ServiceError> {
    let bbox = parse_bbox(p.bbox.as_deref().ok_or_else(|| ServiceError::BadRequest("cells needs bbox=".into()))?)?;
    let level: u8 = match p.level.as_deref() {
        None => fixture::LEVEL,
        Some(l) => l
            .parse()
            .ok()
            .filter(|l| *l <= MAX_LEVEL)
            .ok_or_else(|| ServiceError::BadRequest(format!("level {l:?} is not in 0..={MAX_LEVEL}")))?,
    };
    // Cells near face corners are about half the nominal size.
    let edge = 90.0 / f64::from(1u32 << level.min(30));
    let estimate = (bbox[2] - bbox[0]) * (bbox[3] - bbox[1]) / (edge * edge) * 2.0;
    if estimate > MAX_CELLS as f64 {
        return Err(ServiceError::BadRequest(format!(
            "about {estimate:.0} level-{level} cells in this bbox (limit {MAX_CELLS}); choose a coarser level"
        )));
    }
    blocking(move || {
        let g = Geometry::Polygon(Polygon::rect(bbox[0], bbox[1], bbox[2], bbox[3]).map_err(|e| ServiceError::BadRequest(e.to_string()))?);
        let set: BTreeSet<CellId> = cover_geometry(&g, level).map_err(|e: DggError| ServiceError::BadRequest(e.to_string()))?;
        Ok(Json(cells_geojson(&set)))
    })
    .await
}

async fn datasets(State(state): State<AppState>) -> Result<Json<Value>, ServiceError> {
    to_json(&briefing::datasets(&state.snapshot()))
}

async fn reload(State(state): State<AppState>) -> Result<Json<Value>, ServiceError> {
    let n = blocking(move || state.reload()).await?;
    Ok(Json(json!({ "status": "reloaded", "triples": n })))
}
