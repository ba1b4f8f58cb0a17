//! HTTP routes over a [`SessionStore`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Multipart, Path, State as AxumState};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::Value;
use vizreq_core::dashboard::ValidationOutcome;
use vizreq_core::pipeline::ColumnTypings;

use crate::error::ServiceError;
use crate::session::{AnswerRequest, Event, ReviseRequest, Session, UploadedDataset};
use crate::store::SessionStore;

type Store = Arc<SessionStore>;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self.body())).into_response()
    }
}

fn with_etag(session: &Session, status: StatusCode, body: Value) -> Response {
    let mut resp = (status, Json(body)).into_response();
    resp.headers_mut()
        .insert(header::ETAG, HeaderValue::from(session.version));
    resp
}

fn view(session: &Session, status: StatusCode) -> Response {
    with_etag(
        session,
        status,
        serde_json::to_value(session.view()).expect("view serializes"),
    )
}

/// Version from `If-Match`, bare or quoted.
fn expected_version(headers: &HeaderMap) -> Result<u64, ServiceError> {
    let raw = headers
        .get(header::IF_MATCH)
        .ok_or_else(|| ServiceError::BadRequest("If-Match header with the session version is required".into()))?;
    raw.to_str()
        .ok()
        .map(|s| s.trim().trim_start_matches("W/").trim_matches('"'))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ServiceError::BadRequest("If-Match must hold a session version number".into()))
}

fn parse_json<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, ServiceError> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/datasets", post(datasets))
        .route("/sessions/{id}/validate", post(validate))
        .route("/sessions/{id}/revise", post(revise))
        .route("/sessions/{id}/questionnaire", get(questionnaire))
        .route("/sessions/{id}/recommendation", get(recommendation))
        .route("/sessions/{id}/dashboard", get(dashboard))
        .with_state(store)
}

async fn create(AxumState(store): AxumState<Store>) -> Result<Response, ServiceError> {
    let s = store.create()?;
    Ok(view(&s, StatusCode::CREATED))
}

async fn show(AxumState(store): AxumState<Store>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(view(&store.get(&id)?, StatusCode::OK))
}

fn mutate(store: &SessionStore, id: &str, headers: &HeaderMap, event: Event) -> Result<Response, ServiceError> {
    let version = expected_version(headers)?;
    let s = store.apply(id, version, event)?;
    Ok(view(&s, StatusCode::OK))
}

async fn answer(
    AxumState(store): AxumState<Store>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: axum::body::Bytes,
) -> Result<Response, ServiceError> {
    store.get(&id)?;
    let request: AnswerRequest = parse_json(&body)?;
    mutate(&store, &id, &headers, Event::Answered { request })
}

/// Multipart upload: each part is a CSV named after its collection, except
/// an optional `answers` part holding column typings as JSON.
async fn datasets(
    AxumState(store): AxumState<Store>,
    Path(id): Path<String>,
    headers: HeaderMap,
    mut multipart: Multipart,
) -> Result<Response, ServiceError> {
    store.get(&id)?;
    let bad = |e: axum::extract::multipart::MultipartError| ServiceError::BadRequest(e.to_string());
    let mut uploaded = Vec::new();
    let mut answers = ColumnTypings::default();
    while let Some(field) = multipart.next_field().await.map_err(bad)? {
        let name = field.name().map(String::from).filter(|n| !n.is_empty());
        let file_stem = field
            .file_name()
            .and_then(|f| std::path::Path::new(f).file_stem())
            .and_then(|s| s.to_str())
            .map(String::from);
        let text = field.text().await.map_err(bad)?;
        match name.as_deref() {
            Some("answers") => {
                let more = ColumnTypings::from_json(&text)?;
                answers.0.extend(more.0);
            }
            _ => {
                let collection = name
                    .filter(|n| n != "file")
                    .or(file_stem)
                    .ok_or_else(|| ServiceError::BadRequest("dataset part has no collection name".into()))?;
                uploaded.push(UploadedDataset { collection, csv: text });
            }
        }
    }
    if uploaded.is_empty() && answers.0.is_empty() {
        return Err(ServiceError::BadRequest("upload holds no datasets".into()));
    }
    mutate(
        &store,
        &id,
        &headers,
        Event::DatasetsUploaded {
            datasets: uploaded,
            answers,
        },
    )
}

async fn validate(
    AxumState(store): AxumState<Store>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: axum::body::Bytes,
) -> Result<Response, ServiceError> {
    store.get(&id)?;
    let outcome =
        ValidationOutcome::from_json(std::str::from_utf8(&body).map_err(|e| ServiceError::BadRequest(e.to_string()))?)?;
    mutate(&store, &id, &headers, Event::Validated { outcome })
}

async fn revise(
    AxumState(store): AxumState<Store>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: axum::body::Bytes,
) -> Result<Response, ServiceError> {
    store.get(&id)?;
    let request: ReviseRequest = parse_json(&body)?;
    mutate(&store, &id, &headers, Event::Revised { request })
}

async fn questionnaire(AxumState(store): AxumState<Store>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let s = store.get(&id)?;
    let q = s.questionnaire()?;
    Ok(with_etag(
        &s,
        StatusCode::OK,
        serde_json::to_value(q).expect("questionnaire serializes"),
    ))
}

async fn recommendation(AxumState(store): AxumState<Store>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let s = store.get(&id)?;
    let doc = s.recommendation_doc()?;
    Ok(with_etag(&s, StatusCode::OK, doc))
}

/// Emitted document, byte-identical to the CLI's `emit` output.
async fn dashboard(AxumState(store): AxumState<Store>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let s = store.get(&id)?;
    let body = s.dashboard()?.to_json();
    let mut resp = (StatusCode::OK, [(header::CONTENT_TYPE, "application/json")], body).into_response();
    resp.headers_mut().insert(header::ETAG, HeaderValue::from(s.version));
    Ok(resp)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, store: Store) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}
