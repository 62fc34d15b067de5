//! HTTP routes.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get};
use axum::{Json, Router};
use serde::Serialize;
use tower_http::cors::CorsLayer;

use crate::annotations::NewAnnotation;
use crate::error::ApiError;
use crate::store::{Ingested, Store};
use crate::views::{self, Params};

/// Telemetry documents run to a few megabytes for long matches.
const MAX_BODY: usize = 64 * 1024 * 1024;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/matches", get(list_matches).post(ingest))
        .route("/matches/{id}/summary", get(summary))
        .route("/matches/{id}/timeline", get(timeline))
        .route("/matches/{id}/heatmap", get(heatmap))
        .route("/matches/{id}/trajectory", get(trajectory))
        .route("/matches/{id}/annotations", get(list_annotations).post(create_annotation))
        .route("/matches/{id}/annotations/{aid}", delete(delete_annotation))
        .route("/matches/{id}/labels/export", get(export))
        .layer(DefaultBodyLimit::max(MAX_BODY))
        .layer(CorsLayer::permissive())
        .with_state(store)
}

type Api<T> = Result<T, ApiError>;

/// Runs blocking store work (parsing, detectors, fsync) off the async
/// workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Api<T> + Send + 'static) -> Api<T> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

#[derive(Serialize)]
struct Ingest {
    match_id: String,
}

async fn ingest(State(store): State<Arc<Store>>, body: Bytes) -> Api<Response> {
    let (match_id, outcome) = blocking(move || Ok(store.ingest(&body)?)).await?;
    let status = match outcome {
        Ingested::Created => StatusCode::CREATED,
        Ingested::Unchanged => StatusCode::OK,
    };
    Ok((status, Json(Ingest { match_id })).into_response())
}

async fn list_matches(State(store): State<Arc<Store>>) -> Response {
    let entries = store.list();
    let listing: Vec<_> = entries.iter().map(|e| views::listing(e)).collect();
    Json(listing).into_response()
}

async fn summary(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Api<Response> {
    let entry = store.get(&id)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], entry.summary_json.clone()).into_response())
}

async fn timeline(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(q): Query<Params>,
) -> Api<Response> {
    let entry = store.get(&id)?;
    Ok(Json(views::timeline(&store, &entry, &q)?).into_response())
}

async fn heatmap(State(store): State<Arc<Store>>, Path(id): Path<String>, Query(q): Query<Params>) -> Api<Response> {
    let entry = store.get(&id)?;
    Ok(Json(views::heatmap(&entry, &q)?).into_response())
}

async fn trajectory(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(q): Query<Params>,
) -> Api<Response> {
    let entry = store.get(&id)?;
    Ok(Json(views::trajectory_view(&entry, &q)?).into_response())
}

async fn list_annotations(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Api<Response> {
    let entry = store.get(&id)?;
    let live = entry.annotations().live();
    Ok(Json(live).into_response())
}

async fn create_annotation(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Api<Response> {
    let entry = store.get(&id)?;
    let new: NewAnnotation = serde_json::from_slice(&body)
        .map_err(|e| ApiError::bad_request("invalid_record", format!("annotation body: {e}")))?;
    let new = new.validate(&entry.telemetry)?;
    let record = blocking(move || Ok(entry.annotations().create(&id, new)?)).await?;
    Ok((StatusCode::CREATED, Json(record)).into_response())
}

async fn delete_annotation(
    State(store): State<Arc<Store>>,
    Path((id, aid)): Path<(String, String)>,
) -> Api<Response> {
    let entry = store.get(&id)?;
    let tomb = blocking(move || {
        entry
            .annotations()
            .delete(&aid)?
            .ok_or_else(|| ApiError::not_found("unknown_annotation", format!("no live annotation `{aid}`")))
    })
    .await?;
    Ok(Json(tomb).into_response())
}

async fn export(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Api<Response> {
    let entry = store.get(&id)?;
    let live = entry.annotations().live();
    Ok(Json(views::export(&store, &entry, live)).into_response())
}
