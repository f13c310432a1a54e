//! JSON-over-HTTP service with an in-memory dataset store keyed by content
//! hash.
//!
//! | method | path | body | response |
//! |---|---|---|---|
//! | POST | `/datasets` | `{"csv": ..., "schema": ...}`, `{"records": [...]}` or `{"synthetic": spec, "seed": n}` | id and summary |
//! | GET | `/datasets/{id}` | | id, summary and canonical CSV |
//! | GET | `/datasets/{id}/summary` | | summary |
//! | POST | `/audit` | dataset plus [`AuditSpec`] fields | [`AuditReport`](super::AuditReport) |
//! | POST | `/optimize` | dataset plus [`OptimizeSpec`] fields | [`OptimizeReport`](super::OptimizeReport) |
//! | POST | `/classify-weights` | `{"weights": ..., "claims": ...}` | weight-condition finding |
//!
//! A dataset is referenced as `{"id": "..."}`, `{"csv": "..."}` or
//! `{"records": [...]}`. Validation errors give 400, undefined quantities
//! 422 and unknown ids 404, each with `{"error": {"code", "message"}}`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::data::{
    generate_synthetic, read_dataset, ClaimsDifferentiator, CsvSchema, Dataset, Record, SyntheticSpec,
    UtilityWeights,
};
use crate::equivalence::classify_weights;
use crate::error::Error;

use super::report::{dataset_hash, optimize_request, render_json, run_audit, AuditSpec, DatasetSummary, OptimizeSpec};

#[derive(Clone)]
struct Stored {
    dataset: Arc<Dataset>,
    seed: Option<u64>,
}

/// Datasets by content hash. Inserting content already present returns the
/// existing entry.
#[derive(Default)]
pub struct DatasetStore {
    inner: RwLock<HashMap<String, Stored>>,
}

impl DatasetStore {
    /// Returns the id and whether the dataset was new.
    pub fn insert(&self, ds: Dataset, seed: Option<u64>) -> (String, bool) {
        let id = dataset_hash(&ds);
        let mut map = self.inner.write().expect("store lock");
        let created = !map.contains_key(&id);
        map.entry(id.clone()).or_insert_with(|| Stored {
            dataset: Arc::new(ds),
            seed,
        });
        (id, created)
    }

    fn get(&self, id: &str) -> Option<Stored> {
        self.inner.read().expect("store lock").get(id).cloned()
    }

    pub fn dataset(&self, id: &str) -> Option<Arc<Dataset>> {
        self.get(id).map(|s| s.dataset)
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.into(),
            message: message.into(),
        }
    }

    fn not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "unknown_dataset", format!("no dataset with id `{id}`"))
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            _ if e.is_undefined() => StatusCode::UNPROCESSABLE_ENTITY,
            Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = render_json(&ErrorBody {
            error: ErrorDetail {
                code: &self.code,
                message: &self.message,
            },
        });
        (self.status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

fn json_response<T: Serialize>(status: StatusCode, value: &T) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], render_json(value)).into_response()
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", e.to_string()))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetInput {
    Id(String),
    Csv(String),
    Records(Vec<Record>),
}

#[derive(Debug, Deserialize)]
struct AuditRequest {
    dataset: DatasetInput,
    #[serde(default)]
    schema: CsvSchema,
    #[serde(flatten)]
    spec: AuditSpec,
}

#[derive(Debug, Deserialize)]
struct OptimizeRequest {
    dataset: DatasetInput,
    #[serde(default)]
    schema: CsvSchema,
    #[serde(flatten)]
    spec: OptimizeSpec,
}

#[derive(Debug, Deserialize)]
struct ClassifyRequest {
    weights: UtilityWeights,
    #[serde(default = "ClaimsDifferentiator::none")]
    claims: ClaimsDifferentiator,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UploadRequest {
    csv: Option<String>,
    schema: Option<CsvSchema>,
    records: Option<Vec<Record>>,
    synthetic: Option<SyntheticSpec>,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct UploadResponse {
    id: String,
    created: bool,
    summary: DatasetSummary,
}

#[derive(Serialize)]
struct DatasetView {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    summary: DatasetSummary,
    csv: String,
}

type AppState = Arc<DatasetStore>;

fn resolve(store: &DatasetStore, input: DatasetInput, schema: &CsvSchema) -> Result<Stored, ApiError> {
    match input {
        DatasetInput::Id(id) => store.get(&id).ok_or_else(|| ApiError::not_found(&id)),
        DatasetInput::Csv(text) => Ok(Stored {
            dataset: Arc::new(read_dataset(text.as_bytes(), schema)?),
            seed: None,
        }),
        DatasetInput::Records(records) => Ok(Stored {
            dataset: Arc::new(Dataset::from_records(records)?),
            seed: None,
        }),
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> crate::Result<T> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(ApiError::from)
}

async fn upload(State(store): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: UploadRequest = parse_body(&body)?;
    let sources = req.csv.is_some() as u8 + req.records.is_some() as u8 + req.synthetic.is_some() as u8;
    if sources != 1 {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_request",
            "give exactly one of `csv`, `records` or `synthetic`",
        ));
    }
    let (ds, seed) = if let Some(spec) = req.synthetic {
        let seed = req.seed.unwrap_or(0);
        (blocking(move || generate_synthetic(&spec, seed)).await?, Some(seed))
    } else if let Some(csv) = req.csv {
        (read_dataset(csv.as_bytes(), &req.schema.unwrap_or_default())?, None)
    } else {
        (Dataset::from_records(req.records.unwrap_or_default())?, None)
    };
    let summary = DatasetSummary::of(&ds);
    let (id, created) = store.insert(ds, seed);
    let status = if created { StatusCode::CREATED } else { StatusCode::OK };
    Ok(json_response(status, &UploadResponse { id, created, summary }))
}

async fn dataset(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let stored = store.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let view = DatasetView {
        id,
        seed: stored.seed,
        summary: DatasetSummary::of(&stored.dataset),
        csv: crate::data::dataset_to_csv(&stored.dataset),
    };
    Ok(json_response(StatusCode::OK, &view))
}

async fn summary(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let stored = store.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    Ok(json_response(StatusCode::OK, &DatasetSummary::of(&stored.dataset)))
}

async fn audit(State(store): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: AuditRequest = parse_body(&body)?;
    let stored = resolve(&store, req.dataset, &req.schema)?;
    let spec = req.spec;
    let report = blocking(move || run_audit(&stored.dataset, &spec, stored.seed)).await?;
    Ok(json_response(StatusCode::OK, &report))
}

async fn optimize(State(store): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: OptimizeRequest = parse_body(&body)?;
    let stored = resolve(&store, req.dataset, &req.schema)?;
    let spec = req.spec;
    let report = blocking(move || optimize_request(&stored.dataset, &spec, stored.seed)).await?;
    Ok(json_response(StatusCode::OK, &report))
}

async fn classify(body: Bytes) -> Result<Response, ApiError> {
    let req: ClassifyRequest = parse_body(&body)?;
    Ok(json_response(StatusCode::OK, &classify_weights(&req.weights, &req.claims)))
}

/// The service routes over a fresh store.
pub fn router() -> Router {
    router_with_store(Arc::new(DatasetStore::default()))
}

pub fn router_with_store(store: Arc<DatasetStore>) -> Router {
    Router::new()
        .route("/datasets", post(upload))
        .route("/datasets/{id}", get(dataset))
        .route("/datasets/{id}/summary", get(summary))
        .route("/audit", post(audit))
        .route("/optimize", post(optimize))
        .route("/classify-weights", post(classify))
        .with_state(store)
}

/// Binds `addr` and serves until the process ends.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
