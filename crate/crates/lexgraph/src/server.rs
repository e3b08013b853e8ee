//! Read-only HTTP API.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use axum::extract::{Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use lexgraph_core::graph::ExportFormat;
use lexgraph_core::index::SearchMode;
use lexgraph_core::Error;
use serde::Deserialize;

use crate::service::{parse_list, ApiConfig, GraphParams, SearchParams, Service};

pub struct AppState {
    pub service: Service,
    access_log: Option<Mutex<File>>,
}

impl AppState {
    pub fn new(service: Service, log_path: Option<&std::path::Path>) -> std::io::Result<Self> {
        let access_log = match log_path {
            Some(p) => Some(Mutex::new(
                OpenOptions::new().create(true).append(true).open(p)?,
            )),
            None => None,
        };
        Ok(AppState {
            service,
            access_log,
        })
    }
}

pub struct ApiError(Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

/// HTTP status and machine-readable code for a domain error.
pub fn error_code(e: &Error) -> (StatusCode, &'static str) {
    match e {
        Error::UnknownDocument(_) => (StatusCode::NOT_FOUND, "UNKNOWN_DOCUMENT"),
        Error::UnknownDossier(_) => (StatusCode::NOT_FOUND, "UNKNOWN_DOSSIER"),
        Error::EmptyQuery => (StatusCode::BAD_REQUEST, "EMPTY_QUERY"),
        Error::MalformedExpression(_) => (StatusCode::BAD_REQUEST, "MALFORMED_EXPRESSION"),
        Error::UnknownValue { .. } | Error::MalformedIdentifier { .. } => {
            (StatusCode::BAD_REQUEST, "BAD_PARAMETER")
        }
        _ => (StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL"),
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code) = error_code(&self.0);
        let body = serde_json::json!({"error": {"code": code, "message": self.0.to_string()}});
        (status, json_headers(), body.to_string()).into_response()
    }
}

fn json_headers() -> [(header::HeaderName, &'static str); 1] {
    [(header::CONTENT_TYPE, "application/json; charset=utf-8")]
}

fn json(body: String) -> Response {
    (json_headers(), body).into_response()
}

type Shared = State<Arc<AppState>>;

async fn document(State(s): Shared, Path(celex): Path<String>) -> Result<Response, ApiError> {
    Ok(json(s.service.document(&celex)?))
}

async fn decorated(State(s): Shared, Path(celex): Path<String>) -> Result<Response, ApiError> {
    let markup = s.service.decorated(&celex)?;
    Ok(([(header::CONTENT_TYPE, "text/html; charset=utf-8")], markup).into_response())
}

async fn references(State(s): Shared, Path(celex): Path<String>) -> Result<Response, ApiError> {
    Ok(json(s.service.references(&celex)?))
}

#[derive(Deserialize)]
struct GraphQuery {
    stage: Option<String>,
    collections: Option<String>,
    edge_types: Option<String>,
    format: Option<String>,
}

async fn graph(
    State(s): Shared,
    Path(celex): Path<String>,
    Query(q): Query<GraphQuery>,
) -> Result<Response, ApiError> {
    let params = GraphParams {
        stage: q.stage.as_deref().map(str::parse).transpose()?,
        collections: q.collections.as_deref().map(parse_list).transpose()?,
        edge_types: q.edge_types.as_deref().map(parse_list).transpose()?,
    };
    let format: ExportFormat = q.format.as_deref().unwrap_or("json").parse()?;
    let body = s.service.graph(&celex, &params, format)?;
    Ok(match format {
        ExportFormat::GraphJson => json(body),
        ExportFormat::Dot => (
            [(header::CONTENT_TYPE, "text/vnd.graphviz; charset=utf-8")],
            body,
        )
            .into_response(),
    })
}

#[derive(Deserialize)]
struct SearchQuery {
    q: Option<String>,
    mode: Option<String>,
    synonyms: Option<String>,
    window: Option<String>,
}

async fn search(State(s): Shared, Query(q): Query<SearchQuery>) -> Result<Response, ApiError> {
    let synonyms = match q.synonyms.as_deref() {
        None | Some("0") | Some("false") => false,
        Some("1") | Some("true") => true,
        Some(other) => {
            return Err(Error::UnknownValue {
                what: "synonyms flag",
                value: other.into(),
            }
            .into())
        }
    };
    let window = q
        .window
        .as_deref()
        .map(|w| {
            w.parse::<usize>().map_err(|_| Error::UnknownValue {
                what: "window",
                value: w.into(),
            })
        })
        .transpose()?;
    let params = SearchParams {
        q: q.q.unwrap_or_default(),
        mode: q
            .mode
            .as_deref()
            .map(str::parse)
            .transpose()?
            .unwrap_or(SearchMode::AllWords),
        synonyms,
        window,
    };
    Ok(json(s.service.search(&params)?))
}

#[derive(Deserialize)]
struct RankQuery {
    top: Option<String>,
}

async fn rank(State(s): Shared, Query(q): Query<RankQuery>) -> Result<Response, ApiError> {
    let top = match q.top.as_deref() {
        None => 10,
        Some(t) => match t.parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                return Err(Error::UnknownValue {
                    what: "top",
                    value: t.into(),
                }
                .into())
            }
        },
    };
    Ok(json(s.service.rank_json(top)))
}

async fn not_found() -> Response {
    let body = serde_json::json!({"error": {"code": "NOT_FOUND", "message": "no such endpoint"}});
    (StatusCode::NOT_FOUND, json_headers(), body.to_string()).into_response()
}

/// Logs path, start time, status and latency of every request.
async fn log_request(State(s): Shared, req: Request, next: Next) -> Response {
    let started = Instant::now();
    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
    let method = req.method().clone();
    let path = req.uri().path().to_string();
    let query = req.uri().query().map(str::to_string);
    let response = next.run(req).await;
    let latency_us = started.elapsed().as_micros();
    let status = response.status().as_u16();
    tracing::info!(%method, %path, ?query, status, %timestamp, latency_us, "request");
    if let Some(log) = &s.access_log {
        let line = format!(
            "{timestamp}\t{method}\t{path}{}\t{status}\t{latency_us}\n",
            query.map(|q| format!("?{q}")).unwrap_or_default()
        );
        if let Ok(mut f) = log.lock() {
            if let Err(e) = f.write_all(line.as_bytes()) {
                tracing::warn!("access log write failed: {e}");
            }
        }
    }
    response
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/documents/{celex}", get(document))
        .route("/documents/{celex}/decorated", get(decorated))
        .route("/documents/{celex}/references", get(references))
        .route("/graph/{celex}", get(graph))
        .route("/search", get(search))
        .route("/rank", get(rank))
        .fallback(not_found)
        .layer(middleware::from_fn_with_state(state.clone(), log_request))
        .with_state(state)
}

/// Loads the corpus and serves until Ctrl-C.
pub async fn serve(cfg: &ApiConfig) -> anyhow::Result<()> {
    if !cfg.corpus_dir.is_dir() {
        anyhow::bail!(
            "corpus directory {} is not readable",
            cfg.corpus_dir.display()
        );
    }
    let service = Service::load(cfg)?;
    let state = Arc::new(AppState::new(service, cfg.log_path.as_deref())?);
    let listener = tokio::net::TcpListener::bind(&cfg.listen_address).await?;
    tracing::info!(address = %listener.local_addr()?, documents = state.service.snapshot().len(), "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
