//! HTTP/JSON service over a catalog with asynchronous synthesis jobs.
//!
//! Catalog and taxonomy writes go through a single write lock and are
//! persisted to the data directory before becoming visible. Jobs synthesize
//! against the catalog snapshot taken when they were submitted.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use asmsynth_core::catalog::{validate_part, CatalogError, Diagnostic};
use asmsynth_core::kinematics::KinematicsError;
use asmsynth_core::synthesis::DEFAULT_PROPAGATED_CAP;
use asmsynth_core::{Catalog, Hierarchy};
use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::Semaphore;

use crate::cli::parse_angles;
use crate::data::DataDir;
use crate::formats::{self, BomDoc, PartDoc, ProgramDoc, RequestDoc, TaxonomyDoc};
use crate::pipeline::{synthesize_with_cap, CompiledResult};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl ToString) -> Self {
        ApiError { status, body: json!({ "error": message.to_string() }) }
    }

    fn not_found(what: impl ToString) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, format!("{} not found", what.to_string()))
    }

    fn bad_request(message: impl ToString) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, message)
    }

    fn internal(message: impl ToString) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

fn diagnostics_json(diagnostics: &[Diagnostic]) -> Value {
    diagnostics
        .iter()
        .map(|d| {
            json!({
                "severity": if d.is_error() { "error" } else { "warning" },
                "jointOrigin": d.joint_origin,
                "message": d.to_string(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
}

#[derive(Debug)]
struct Job {
    request: RequestDoc,
    state: JobState,
    results: Option<Arc<Vec<CompiledResult>>>,
    catalog: Arc<Catalog>,
    error: Option<String>,
    submitted_at: u64,
    started_at: Option<u64>,
    finished_at: Option<u64>,
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

pub struct AppState {
    catalog: RwLock<Arc<Catalog>>,
    data: Option<DataDir>,
    jobs: Mutex<BTreeMap<u64, Job>>,
    next_job: Mutex<u64>,
    workers: Arc<Semaphore>,
}

impl AppState {
    /// `data` is where writes are persisted; `None` keeps everything in
    /// memory.
    pub fn new(catalog: Catalog, data: Option<DataDir>, workers: usize) -> Arc<Self> {
        Arc::new(AppState {
            catalog: RwLock::new(Arc::new(catalog)),
            data,
            jobs: Mutex::new(BTreeMap::new()),
            next_job: Mutex::new(1),
            workers: Arc::new(Semaphore::new(workers.max(1))),
        })
    }

    pub fn catalog(&self) -> Arc<Catalog> {
        self.catalog.read().expect("catalog lock").clone()
    }

    /// Runs `update` under the write lock, persists and publishes its result.
    fn write_catalog<F>(&self, update: F) -> ApiResult<()>
    where
        F: FnOnce(&Catalog) -> ApiResult<(Catalog, Persist)>,
    {
        let mut guard = self.catalog.write().expect("catalog lock");
        let (next, persist) = update(&guard)?;
        if let Some(data) = &self.data {
            let saved = match &persist {
                Persist::Taxonomies => data.save_taxonomies(next.taxonomy()),
                Persist::Part(id) => data.save_part(next.part(id).expect("part was just stored")),
            };
            saved.map_err(ApiError::internal)?;
        }
        *guard = Arc::new(next);
        Ok(())
    }

    fn with_job<T>(&self, id: &str, f: impl FnOnce(&Job) -> ApiResult<T>) -> ApiResult<T> {
        let id: u64 = id.parse().map_err(|_| ApiError::not_found(format!("job {id}")))?;
        let jobs = self.jobs.lock().expect("jobs lock");
        let job = jobs.get(&id).ok_or_else(|| ApiError::not_found(format!("job {id}")))?;
        f(job)
    }

    fn update_job(&self, id: u64, f: impl FnOnce(&mut Job)) {
        if let Some(job) = self.jobs.lock().expect("jobs lock").get_mut(&id) {
            f(job);
        }
    }
}

enum Persist {
    Taxonomies,
    Part(String),
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/taxonomies/{hierarchy}", get(get_taxonomy).put(put_taxonomy))
        .route("/parts", get(list_parts))
        .route("/parts/{part_id}", get(get_part).put(put_part))
        .route("/requests", axum::routing::post(post_request))
        .route("/jobs/{id}", get(get_job))
        .route("/jobs/{id}/results", get(list_results))
        .route("/jobs/{id}/results/{index}", get(get_result))
        .route("/jobs/{id}/results/{index}/bom", get(get_bom))
        .route("/jobs/{id}/results/{index}/program", get(get_program))
        .route("/jobs/{id}/results/{index}/scene", get(get_scene))
        .with_state(state)
}

fn hierarchy(name: &str) -> ApiResult<Hierarchy> {
    Hierarchy::from_str(name).map_err(|_| ApiError::not_found(format!("hierarchy {name}")))
}

async fn get_taxonomy(State(state): State<Arc<AppState>>, Path(h): Path<String>) -> ApiResult<Json<TaxonomyDoc>> {
    let h = hierarchy(&h)?;
    Ok(Json(TaxonomyDoc::from_taxonomy(state.catalog().taxonomy().taxonomy(h))))
}

async fn put_taxonomy(
    State(state): State<Arc<AppState>>,
    Path(h): Path<String>,
    body: Bytes,
) -> ApiResult<Json<TaxonomyDoc>> {
    let h = hierarchy(&h)?;
    let doc: TaxonomyDoc = parse_body(&body)?;
    if doc.hierarchy != h.as_str() {
        return Err(ApiError::bad_request(format!("body describes hierarchy {:?}, not {h}", doc.hierarchy)));
    }
    let tax = doc.to_taxonomy().map_err(|e| ApiError::new(StatusCode::CONFLICT, e))?;
    state.write_catalog(|catalog| {
        let ctx = catalog.taxonomy().with_taxonomy(tax);
        let next = catalog.with_taxonomy(ctx).map_err(|e| {
            ApiError::new(StatusCode::CONFLICT, format!("taxonomy would invalidate the catalog: {e}"))
        })?;
        Ok((next, Persist::Taxonomies))
    })?;
    Ok(Json(TaxonomyDoc::from_taxonomy(state.catalog().taxonomy().taxonomy(h))))
}

async fn list_parts(State(state): State<Arc<AppState>>) -> Json<Vec<PartDoc>> {
    Json(state.catalog().parts().map(PartDoc::from_part).collect())
}

async fn get_part(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<PartDoc>> {
    let catalog = state.catalog();
    let part = catalog.part(&id).ok_or_else(|| ApiError::not_found(format!("part {id}")))?;
    Ok(Json(PartDoc::from_part(part)))
}

async fn put_part(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<PartDoc>> {
    let doc: PartDoc = parse_body(&body)?;
    if doc.part_id != id {
        return Err(ApiError::bad_request(format!("body describes part {:?}, not {id:?}", doc.part_id)));
    }
    let part = doc.to_part().map_err(ApiError::bad_request)?;
    state.write_catalog(|catalog| {
        let diagnostics = validate_part(catalog.taxonomy(), &part);
        let invalid = |message: String, diagnostics: &[Diagnostic]| ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: json!({ "error": message, "diagnostics": diagnostics_json(diagnostics) }),
        };
        if diagnostics.iter().any(Diagnostic::is_error) {
            return Err(invalid(format!("part {id} is invalid"), &diagnostics));
        }
        let next = catalog.upsert_part(part.clone()).map_err(|e| match e {
            CatalogError::InvalidPart { diagnostics, .. } => invalid(format!("part {id} is invalid"), &diagnostics),
            other => invalid(other.to_string(), &[]),
        })?;
        Ok((next, Persist::Part(id.clone())))
    })?;
    let catalog = state.catalog();
    Ok(Json(PartDoc::from_part(catalog.part(&id).expect("part was just stored"))))
}

async fn post_request(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let doc: RequestDoc = parse_body(&body)?;
    let request = doc.to_request();
    let catalog = state.catalog();
    request
        .validate(catalog.taxonomy(), DEFAULT_PROPAGATED_CAP)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e))?;

    let id = {
        let mut next = state.next_job.lock().expect("job counter");
        let id = *next;
        *next += 1;
        id
    };
    state.jobs.lock().expect("jobs lock").insert(
        id,
        Job {
            request: formats::RequestDoc::from_request(&request),
            state: JobState::Queued,
            results: None,
            catalog: catalog.clone(),
            error: None,
            submitted_at: now_ms(),
            started_at: None,
            finished_at: None,
        },
    );

    let worker_state = state.clone();
    tokio::spawn(async move {
        let permit = worker_state.workers.clone().acquire_owned().await;
        worker_state.update_job(id, |j| {
            j.state = JobState::Running;
            j.started_at = Some(now_ms());
        });
        let outcome =
            tokio::task::spawn_blocking(move || synthesize_with_cap(&catalog, &request, DEFAULT_PROPAGATED_CAP)).await;
        drop(permit);
        worker_state.update_job(id, |j| {
            j.finished_at = Some(now_ms());
            match outcome {
                Ok(Ok(results)) => {
                    j.state = JobState::Done;
                    j.results = Some(Arc::new(results));
                }
                Ok(Err(e)) => {
                    j.state = JobState::Failed;
                    j.error = Some(e.to_string());
                }
                Err(e) => {
                    j.state = JobState::Failed;
                    j.error = Some(format!("worker crashed: {e}"));
                }
            }
        });
        tracing::info!(job = id, "finished");
    });

    Ok((StatusCode::ACCEPTED, Json(json!({ "jobId": id.to_string() }))).into_response())
}

async fn get_job(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    state.with_job(&id, |job| {
        Ok(Json(json!({
            "jobId": id,
            "state": job.state,
            "request": job.request,
            "resultCount": job.results.as_ref().map(|r| r.len()),
            "error": job.error,
            "submittedAt": job.submitted_at,
            "startedAt": job.started_at,
            "finishedAt": job.finished_at,
        })))
    })
}

/// Results of a finished job with the catalog snapshot they refer to.
fn finished(state: &AppState, id: &str) -> ApiResult<(Arc<Vec<CompiledResult>>, Arc<Catalog>)> {
    state.with_job(id, |job| match (&job.state, &job.results) {
        (JobState::Done, Some(results)) => Ok((results.clone(), job.catalog.clone())),
        (JobState::Failed, _) => Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("job {id} failed: {}", job.error.as_deref().unwrap_or("unknown error")),
        )),
        _ => Err(ApiError::new(StatusCode::CONFLICT, format!("job {id} has not finished"))),
    })
}

fn result_at(state: &AppState, id: &str, index: &str) -> ApiResult<(CompiledResult, Arc<Catalog>)> {
    let (results, catalog) = finished(state, id)?;
    let i: usize = index.parse().map_err(|_| ApiError::not_found(format!("result {index}")))?;
    let r = results.get(i).ok_or_else(|| ApiError::not_found(format!("result {index}")))?;
    Ok((r.clone(), catalog))
}

#[derive(Debug, Deserialize)]
struct Page {
    offset: Option<usize>,
    limit: Option<usize>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct ResultRow {
    index: usize,
    part_count: usize,
    total_known_cost: f64,
    cost_complete: bool,
}

async fn list_results(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(page): Query<Page>,
) -> ApiResult<Json<Value>> {
    let (results, _) = finished(&state, &id)?;
    let offset = page.offset.unwrap_or(0);
    let limit = page.limit.unwrap_or(results.len());
    let items: Vec<ResultRow> = results
        .iter()
        .enumerate()
        .skip(offset)
        .take(limit)
        .map(|(index, r)| ResultRow {
            index,
            part_count: r.part_count,
            total_known_cost: r.bom.total_known_cost.to_f64(),
            cost_complete: r.bom.cost_complete,
        })
        .collect();
    Ok(Json(json!({ "total": results.len(), "offset": offset, "items": items })))
}

async fn get_result(
    State(state): State<Arc<AppState>>,
    Path((id, index)): Path<(String, String)>,
) -> ApiResult<Json<formats::ResultDoc>> {
    Ok(Json(result_at(&state, &id, &index)?.0.doc()))
}

async fn get_bom(
    State(state): State<Arc<AppState>>,
    Path((id, index)): Path<(String, String)>,
) -> ApiResult<Json<BomDoc>> {
    Ok(Json(BomDoc::from_bom(&result_at(&state, &id, &index)?.0.bom)))
}

async fn get_program(
    State(state): State<Arc<AppState>>,
    Path((id, index)): Path<(String, String)>,
) -> ApiResult<Json<ProgramDoc>> {
    Ok(Json(ProgramDoc::from_program(&result_at(&state, &id, &index)?.0.program)))
}

#[derive(Debug, Deserialize)]
struct SceneQuery {
    angles: Option<String>,
}

async fn get_scene(
    State(state): State<Arc<AppState>>,
    Path((id, index)): Path<(String, String)>,
    Query(q): Query<SceneQuery>,
) -> ApiResult<Json<Vec<formats::SceneEntry>>> {
    let (result, catalog) = result_at(&state, &id, &index)?;
    let angles = match q.angles {
        Some(s) => parse_angles(&s).map_err(ApiError::bad_request)?,
        None => vec![0.0; asmsynth_core::kinematics::dof(&result.tree)],
    };
    let posed = result.pose(&catalog, &angles).map_err(|e| match e {
        KinematicsError::AngleCountMismatch { .. } => ApiError::bad_request(format!("AngleCountMismatch: {e}")),
        other => ApiError::internal(other),
    })?;
    Ok(Json(formats::scene_entries(&posed)))
}
