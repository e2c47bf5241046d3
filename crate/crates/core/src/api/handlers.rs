use std::collections::HashMap;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use super::{ApiState, Command};
use crate::orchestrator::PipelineError;
use crate::p2p::{P2pError, SuspectMode};
use crate::surveillance::SurveillanceError;

pub(crate) struct ApiError {
    status: StatusCode,
    code: &'static str,
    detail: String,
    line: Option<usize>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, detail: impl Into<String>) -> Self {
        Self { status, code, detail: detail.into(), line: None }
    }

    fn unavailable() -> Self {
        Self::new(StatusCode::SERVICE_UNAVAILABLE, "WriterUnavailable", "ledger writer has stopped")
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.code, "detail": self.detail });
        if let Some(line) = self.line {
            body["line"] = json!(line);
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        let status = match e {
            PipelineError::DuplicateCase(_) => StatusCode::CONFLICT,
            PipelineError::UnknownPerson(_) => StatusCode::NOT_FOUND,
            PipelineError::Pattern(_) | PipelineError::Surveillance(_) => StatusCode::UNPROCESSABLE_ENTITY,
            PipelineError::Ledger(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self::new(status, e.code(), e.to_string())
    }
}

impl From<P2pError> for ApiError {
    fn from(e: P2pError) -> Self {
        let (status, code) = match e {
            P2pError::ClusterTooSmall(_) => (StatusCode::BAD_REQUEST, "ClusterTooSmall"),
            P2pError::UnknownClient(_) => (StatusCode::NOT_FOUND, "UnknownClient"),
            P2pError::Domain(_) => (StatusCode::BAD_REQUEST, "DomainError"),
        };
        Self::new(status, code, e.to_string())
    }
}

type ApiResult = Result<Response, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", e.to_string()))
}

pub(crate) async fn health(State(state): State<ApiState>) -> Json<serde_json::Value> {
    let snap = state.snapshot();
    Json(json!({ "status": "ok", "blocks": snap.chain().len() }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseBody {
    case_id: String,
    #[serde(default)]
    at: Option<u64>,
}

pub(crate) async fn register_case(State(state): State<ApiState>, body: Bytes) -> ApiResult {
    let CaseBody { case_id, at } = parse_body(&body)?;
    if case_id.is_empty() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", "case_id is empty"));
    }
    let record = state
        .submit(|reply| Command::RegisterCase { case_id, at, reply })
        .await
        .ok_or_else(ApiError::unavailable)??;
    Ok((StatusCode::CREATED, Json(record)).into_response())
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FlushBody {
    #[serde(default)]
    at: Option<u64>,
}

pub(crate) async fn flush(State(state): State<ApiState>, body: Bytes) -> ApiResult {
    let FlushBody { at } = if body.is_empty() { FlushBody::default() } else { parse_body(&body)? };
    let height = state.submit(|reply| Command::Flush { at, reply }).await.ok_or_else(ApiError::unavailable)??;
    Ok(Json(json!({ "sealed_height": height })).into_response())
}

pub(crate) async fn chain(State(state): State<ApiState>) -> ApiResult {
    let snap = state.snapshot();
    Ok(Json(snap.chain().blocks()).into_response())
}

pub(crate) async fn block(State(state): State<ApiState>, Path(height): Path<String>) -> ApiResult {
    let height: u64 = height
        .parse()
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", format!("invalid height {height:?}")))?;
    let snap = state.snapshot();
    match snap.block(height) {
        Some(b) => Ok(Json(b).into_response()),
        None => Err(ApiError::new(StatusCode::NOT_FOUND, "UnknownBlock", format!("no block at height {height}"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyBody {
    code: String,
}

pub(crate) async fn verify(State(state): State<ApiState>, body: Bytes) -> ApiResult {
    let VerifyBody { code } = parse_body(&body)?;
    Ok(Json(state.snapshot().verify(&code)).into_response())
}

fn unknown_client(id: &str) -> ApiError {
    ApiError::from(P2pError::UnknownClient(id.to_string()))
}

pub(crate) async fn inbox(State(state): State<ApiState>, Path(id): Path<String>) -> ApiResult {
    let snap = state.snapshot();
    let inbox = snap.inbox(&id).ok_or_else(|| unknown_client(&id))?;
    Ok(Json(inbox).into_response())
}

pub(crate) async fn risk(State(state): State<ApiState>, Path(id): Path<String>) -> ApiResult {
    let snap = state.snapshot();
    let estimate = snap.risk(&id).ok_or_else(|| unknown_client(&id))?;
    Ok(Json(estimate).into_response())
}

pub(crate) async fn suspects(State(state): State<ApiState>, Query(q): Query<HashMap<String, String>>) -> ApiResult {
    let bad = |detail: String| ApiError::new(StatusCode::BAD_REQUEST, "BadQuery", detail);
    let snap = state.snapshot();
    let mode = match (q.get("threshold"), q.get("k")) {
        (Some(_), Some(_)) => return Err(bad("give either threshold or k, not both".into())),
        (Some(t), None) => {
            let tau: f64 = t.parse().map_err(|_| bad(format!("threshold {t:?} is not a number")))?;
            if tau.is_nan() || tau < 0.0 {
                return Err(bad(format!("threshold {t:?} must be non-negative")));
            }
            SuspectMode::Threshold(tau)
        }
        (None, Some(k)) => {
            let k: usize = k.parse().map_err(|_| bad(format!("k {k:?} is not a positive integer")))?;
            if k == 0 {
                return Err(bad("k must be at least 1".into()));
            }
            SuspectMode::TopK(k)
        }
        (None, None) => SuspectMode::Threshold(snap.config().suspect_threshold()),
    };
    Ok(Json(snap.suspects(&mode)).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClusterBody {
    member_ids: Vec<String>,
    #[serde(default)]
    at: Option<u64>,
}

pub(crate) async fn clusters(State(state): State<ApiState>, body: Bytes) -> ApiResult {
    let ClusterBody { member_ids, at } = parse_body(&body)?;
    let snap = state.snapshot();
    let views = snap.exchange(&member_ids, at.unwrap_or_else(|| snap.default_now()))?;
    Ok(Json(views).into_response())
}

pub(crate) async fn ingest(State(state): State<ApiState>, body: Bytes) -> ApiResult {
    let text = String::from_utf8(body.to_vec())
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", "body is not UTF-8"))?;
    let accepted = state.submit(|reply| Command::Ingest { body: text, reply }).await.ok_or_else(ApiError::unavailable)?;
    match accepted {
        Ok(n) => Ok(Json(json!({ "accepted": n })).into_response()),
        Err(SurveillanceError::Schema { line, detail }) => Err(ApiError {
            line: Some(line),
            ..ApiError::new(StatusCode::BAD_REQUEST, "SchemaError", format!("line {line}: {detail}"))
        }),
        Err(e) => Err(ApiError::new(StatusCode::BAD_REQUEST, "SchemaError", e.to_string())),
    }
}
