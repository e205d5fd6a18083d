//! HTTP front end: clip uploads in, detections or super images out.

use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use iis_core::{
    build_super_image, decode_iisv, detect, sample, write_ppm, Clip, ErrorName, SamplerKind,
    SamplerSpec,
};
use serde::Deserialize;
use tokio::net::TcpListener;
use tokio::sync::{OwnedSemaphorePermit, Semaphore};

use crate::config::ServiceConfig;
use crate::error::{Error, Result};
use crate::json::{ClipResponse, ErrorBody};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const VERSION_HEADER: &str = "x-iis-version";

/// Shared, immutable after startup apart from the two semaphores.
#[derive(Clone)]
pub struct AppState {
    config: Arc<ServiceConfig>,
    /// One permit per request that is running or waiting; exhaustion means 503.
    admission: Arc<Semaphore>,
    workers: Arc<Semaphore>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            admission: Arc::new(Semaphore::new(config.worker_count + config.queue_capacity)),
            workers: Arc::new(Semaphore::new(config.worker_count)),
            config: Arc::new(config),
        }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn admission(&self) -> Arc<Semaphore> {
        self.admission.clone()
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new<E: ErrorName + std::fmt::Display>(status: StatusCode, e: &E) -> Self {
        ApiError {
            status,
            body: ErrorBody::new(e),
        }
    }

    fn busy() -> Self {
        ApiError {
            status: StatusCode::SERVICE_UNAVAILABLE,
            body: ErrorBody {
                error: "QueueFull".into(),
                message: "request queue is full".into(),
            },
        }
    }

    fn internal(message: String) -> Self {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: ErrorBody {
                error: "Internal".into(),
                message,
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Iisv(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, &e)
    }
}

#[derive(Debug, Default, Deserialize)]
pub struct PipelineQuery {
    pub sampler: Option<String>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

impl PipelineQuery {
    /// The request's sampler, falling back to the configured one field by field.
    pub fn spec(&self, default: &SamplerSpec) -> Result<SamplerSpec> {
        let kind = match &self.sampler {
            Some(s) => s.parse::<SamplerKind>()?,
            None => default.kind,
        };
        Ok(SamplerSpec {
            kind,
            k: self.k.unwrap_or(default.k),
            seed: self.seed.or(default.seed),
        })
    }
}

pub fn router(config: ServiceConfig) -> Router {
    router_with_state(AppState::new(config))
}

pub fn router_with_state(state: AppState) -> Router {
    let limit = state.config.max_body_bytes;
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/clips", post(clips))
        .route("/v1/superimage", post(superimage))
        .fallback(not_found)
        .layer(DefaultBodyLimit::max(limit))
        .layer(axum::middleware::map_response(stamp_version))
        .with_state(state)
}

async fn stamp_version(mut res: Response) -> Response {
    res.headers_mut()
        .insert(VERSION_HEADER, HeaderValue::from_static(VERSION));
    res
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok", "version": VERSION }))
}

async fn not_found() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        body: ErrorBody {
            error: "NotFound".into(),
            message: "no such route".into(),
        },
    }
}

/// Admits, decodes and then runs `job` on a blocking worker.
async fn run_job<T, F>(
    state: &AppState,
    query: &PipelineQuery,
    body: &[u8],
    job: F,
) -> std::result::Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(Clip, SamplerSpec, &ServiceConfig) -> Result<T> + Send + 'static,
{
    let admitted: OwnedSemaphorePermit = state
        .admission
        .clone()
        .try_acquire_owned()
        .map_err(|_| ApiError::busy())?;
    let clip = decode_iisv(body).map_err(Error::from)?;
    let spec = query.spec(&state.config.sampler)?;
    let worker = state
        .workers
        .clone()
        .acquire_owned()
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?;
    let config = state.config.clone();
    let out = tokio::task::spawn_blocking(move || {
        let _held = (admitted, worker);
        job(clip, spec, &config)
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(out?)
}

async fn clips(
    State(state): State<AppState>,
    Query(query): Query<PipelineQuery>,
    body: Bytes,
) -> std::result::Result<Json<ClipResponse>, ApiError> {
    let response = run_job(&state, &query, &body, |clip, spec, config| {
        let start = Instant::now();
        sample(&clip, &spec, &config.flow)?;
        let detection = detect(&clip, config.threshold, &config.flow)?;
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        Ok(ClipResponse::new(&detection, clip.len(), &spec, ms))
    })
    .await?;
    Ok(Json(response))
}

async fn superimage(
    State(state): State<AppState>,
    Query(query): Query<PipelineQuery>,
    body: Bytes,
) -> std::result::Result<Response, ApiError> {
    let image = run_job(&state, &query, &body, |clip, spec, config| {
        Ok(build_super_image(&clip, &spec, None, &config.flow)?)
    })
    .await?;
    let indices: Vec<String> = image.source_indices.iter().map(usize::to_string).collect();
    Ok((
        [
            (header::CONTENT_TYPE, "image/x-portable-pixmap".to_string()),
            (
                header::HeaderName::from_static("x-grid-rows"),
                image.layout.rows.to_string(),
            ),
            (
                header::HeaderName::from_static("x-grid-cols"),
                image.layout.cols.to_string(),
            ),
            (
                header::HeaderName::from_static("x-indices"),
                indices.join(","),
            ),
        ],
        write_ppm(&image.image),
    )
        .into_response())
}

/// Serves on an already bound listener until ctrl-c.
pub async fn serve_on(listener: TcpListener, state: AppState) -> Result<()> {
    let addr = listener
        .local_addr()
        .map_err(|e| Error::io("listener", e))?;
    axum::serve(listener, router_with_state(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| Error::io(addr.to_string(), e))
}

pub async fn serve(config: ServiceConfig) -> Result<()> {
    let listener = TcpListener::bind(&config.listen_address)
        .await
        .map_err(|e| Error::io(&config.listen_address, e))?;
    serve_on(listener, AppState::new(config)).await
}
