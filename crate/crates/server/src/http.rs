//! The HTTP service.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{FromRequest, Multipart, Path, Query, Request, State};
use axum::http::header::{ACCEPT, CONTENT_TYPE, LOCATION, VARY};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ontohub_core::hierarchy::tree_text;
use ontohub_core::SyntaxFormat;
use serde::{Deserialize, Serialize};

use crate::error::AppError;
use crate::hub::{parse_format, Hub, JobRequest, RegisterParams};

pub const JSON: &str = "application/json";
pub const HTML: &str = "text/html";
pub const TEXT: &str = "text/plain";

impl IntoResponse for AppError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self.body())).into_response()
    }
}

/// One media range from an Accept header.
struct MediaRange {
    kind: String,
    subtype: String,
    q: f32,
}

fn media_ranges(accept: &str) -> Vec<MediaRange> {
    accept
        .split(',')
        .filter_map(|part| {
            let mut pieces = part.split(';');
            let (kind, subtype) = pieces.next()?.trim().split_once('/')?;
            let mut q = 1.0;
            for param in pieces {
                if let Some((k, v)) = param.split_once('=') {
                    if k.trim().eq_ignore_ascii_case("q") {
                        q = v.trim().parse().unwrap_or(0.0);
                    }
                }
            }
            Some(MediaRange {
                kind: kind.trim().to_ascii_lowercase(),
                subtype: subtype.trim().to_ascii_lowercase(),
                q,
            })
        })
        .collect()
}

/// Index of the offered type with the highest quality; the most specific
/// matching range decides each type's quality and earlier offers win ties.
/// A missing or empty Accept header takes the first offer.
pub fn negotiate(accept: Option<&str>, offered: &[&str]) -> Option<usize> {
    let ranges = match accept.map(str::trim) {
        None | Some("") => return (!offered.is_empty()).then_some(0),
        Some(a) => media_ranges(a),
    };
    let mut best: Option<(usize, f32)> = None;
    for (i, offer) in offered.iter().enumerate() {
        let (kind, subtype) = offer.split_once('/').expect("offered types are kind/subtype");
        let q = ranges
            .iter()
            .filter_map(|r| {
                let specificity = match (r.kind.as_str(), r.subtype.as_str()) {
                    (k, s) if k == kind && s == subtype => 3,
                    (k, "*") if k == kind => 2,
                    ("*", "*") => 1,
                    _ => return None,
                };
                Some((specificity, r.q))
            })
            .max_by_key(|(s, _)| *s)
            .map(|(_, q)| q)
            .unwrap_or(0.0);
        if q > 0.0 && best.is_none_or(|(_, bq)| q > bq) {
            best = Some((i, q));
        }
    }
    best.map(|(i, _)| i)
}

fn accept(headers: &HeaderMap) -> Option<&str> {
    headers.get(ACCEPT).and_then(|v| v.to_str().ok())
}

fn choose(headers: &HeaderMap, offered: &[&'static str]) -> Result<&'static str, AppError> {
    negotiate(accept(headers), offered)
        .map(|i| offered[i])
        .ok_or_else(|| AppError::NotAcceptable {
            supported: offered.to_vec(),
        })
}

fn with_type(body: impl IntoResponse, media_type: &str) -> Response {
    let mut resp = body.into_response();
    let value = if media_type.starts_with("text/") {
        format!("{media_type}; charset=utf-8")
    } else {
        media_type.to_owned()
    };
    resp.headers_mut().insert(
        CONTENT_TYPE,
        HeaderValue::from_str(&value).expect("media types are header-safe"),
    );
    resp.headers_mut().insert(VARY, HeaderValue::from_static("Accept"));
    resp
}

fn json_as(headers: &HeaderMap, value: &impl Serialize) -> Result<Response, AppError> {
    choose(headers, &[JSON])?;
    let body = serde_json::to_vec(value).map_err(|e| AppError::Internal(e.to_string()))?;
    Ok(with_type(body, JSON))
}

type Shared = Arc<Hub>;

async fn blocking<T, F>(hub: Shared, f: F) -> Result<T, AppError>
where
    T: Send + 'static,
    F: FnOnce(&Hub) -> Result<T, AppError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&hub))
        .await
        .map_err(|e| AppError::Internal(e.to_string()))?
}

fn query<T>(q: Result<Query<T>, axum::extract::rejection::QueryRejection>) -> Result<T, AppError> {
    q.map(|Query(t)| t).map_err(|e| AppError::BadRequest(e.body_text()))
}

pub fn router(hub: Arc<Hub>) -> Router {
    Router::new()
        .route("/ontologies", get(list).post(register))
        .route("/ontology/{prefix}", get(dump))
        .route("/ontology/{prefix}/versions", get(versions))
        .route("/ontology/{prefix}/diff", get(diff))
        .route("/ontology/{prefix}/rollback", post(rollback))
        .route("/ontology/{prefix}/view/tree", get(tree))
        .route("/ontology/{prefix}/view/list", get(list_view))
        .route("/ontology/{prefix}/view/vowl", get(vowl))
        .route("/search", get(search))
        .route("/validate", post(validate))
        .route("/endpoint-graphs", get(endpoint_graphs))
        .fallback(|| async { AppError::NotFound("no such route".into()) })
        .with_state(hub)
}

async fn list(State(hub): State<Shared>, headers: HeaderMap) -> Result<Response, AppError> {
    let records = blocking(hub, |h| Ok(h.registry.list())).await?;
    json_as(&headers, &records)
}

impl RegisterParams {
    fn set(&mut self, key: &str, value: String) -> Result<(), AppError> {
        let slot = match key.replace('_', "-").as_str() {
            "prefix" => {
                self.prefix = value;
                return Ok(());
            }
            "version" => &mut self.version,
            "issued" => &mut self.issued,
            "title" => &mut self.title,
            "description" => &mut self.description,
            "rights" => &mut self.rights,
            "license" => &mut self.license,
            "contributor" => &mut self.contributor,
            "catalogue" => {
                let joined = match self.catalogue.take() {
                    Some(prev) => format!("{prev},{value}"),
                    None => value,
                };
                self.catalogue = Some(joined);
                return Ok(());
            }
            "source-graph" => &mut self.source_graph,
            "base" => &mut self.base,
            "format" => &mut self.format,
            other => return Err(AppError::BadRequest(format!("unknown field {other:?}"))),
        };
        *slot = Some(value);
        Ok(())
    }
}

/// Raw document body with metadata in the query string, or multipart with a
/// `file` part plus one part per metadata field.
async fn register(
    State(hub): State<Shared>,
    params: Result<Query<RegisterParams>, axum::extract::rejection::QueryRejection>,
    request: Request,
) -> Result<Response, AppError> {
    let mut params = query(params)?;
    let content_type = request
        .headers()
        .get(CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .map(str::to_owned);
    let (document, doc_type) = match content_type.as_deref() {
        Some(ct) if ct.to_ascii_lowercase().starts_with("multipart/form-data") => {
            let mut form = Multipart::from_request(request, &())
                .await
                .map_err(|e| AppError::BadRequest(e.body_text()))?;
            let mut document = None;
            while let Some(field) = form
                .next_field()
                .await
                .map_err(|e| AppError::BadRequest(e.body_text()))?
            {
                let name = field.name().unwrap_or_default().to_owned();
                if name == "file" || name == "document" {
                    let ct = field.content_type().map(str::to_owned);
                    let bytes = field.bytes().await.map_err(|e| AppError::BadRequest(e.body_text()))?;
                    document = Some((bytes, ct));
                } else {
                    let text = field.text().await.map_err(|e| AppError::BadRequest(e.body_text()))?;
                    params.set(&name, text)?;
                }
            }
            document.ok_or_else(|| AppError::BadRequest("multipart body lacks a file part".into()))?
        }
        _ => {
            let bytes = Bytes::from_request(request, &())
                .await
                .map_err(|e| AppError::BadRequest(e.body_text()))?;
            (bytes, content_type)
        }
    };
    if let Some(ct) = doc_type.as_deref() {
        let essence = ct.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
        let generic = [
            "",
            "application/octet-stream",
            "text/plain",
            "application/x-www-form-urlencoded",
        ];
        match SyntaxFormat::from_media_type(ct) {
            Some(f) if !f.is_parseable() => return Err(AppError::UnsupportedMediaType(ct.to_owned())),
            None if !generic.contains(&essence.as_str()) => return Err(AppError::UnsupportedMediaType(ct.to_owned())),
            _ => {}
        }
    }
    let record = blocking(hub, move |h| h.register(&document, &params, doc_type.as_deref())).await?;
    let mut resp = (StatusCode::CREATED, Json(&record)).into_response();
    if let Ok(loc) = HeaderValue::from_str(&format!("/ontology/{}", record.prefix)) {
        resp.headers_mut().insert(LOCATION, loc);
    }
    Ok(resp)
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct DumpParams {
    version: Option<String>,
    format: Option<String>,
}

async fn dump(
    State(hub): State<Shared>,
    Path(prefix): Path<String>,
    params: Result<Query<DumpParams>, axum::extract::rejection::QueryRejection>,
    headers: HeaderMap,
) -> Result<Response, AppError> {
    let params = query(params)?;
    let format = match &params.format {
        Some(f) => parse_format(f)?,
        None => {
            let offered = SyntaxFormat::ALL.map(SyntaxFormat::media_type);
            SyntaxFormat::from_media_type(choose(&headers, &offered)?).expect("offered types map back")
        }
    };
    let body = blocking(hub, move |h| {
        Ok(h.registry.dump(&prefix, params.version.as_deref(), format)?)
    })
    .await?;
    Ok(with_type(body, format.media_type()))
}

async fn versions(
    State(hub): State<Shared>,
    Path(prefix): Path<String>,
    headers: HeaderMap,
) -> Result<Response, AppError> {
    let v = blocking(hub, move |h| Ok(h.registry.versions(&prefix)?)).await?;
    json_as(&headers, &v)
}

#[derive(Debug, Deserialize)]
struct DiffParams {
    from: String,
    to: String,
}

#[derive(Serialize)]
struct DiffBody {
    added: Vec<String>,
    removed: Vec<String>,
}

async fn diff(
    State(hub): State<Shared>,
    Path(prefix): Path<String>,
    params: Result<Query<DiffParams>, axum::extract::rejection::QueryRejection>,
    headers: HeaderMap,
) -> Result<Response, AppError> {
    let p = query(params)?;
    let d = blocking(hub, move |h| Ok(h.registry.diff(&prefix, &p.from, &p.to)?)).await?;
    let lines = |set: &std::collections::BTreeSet<ontohub_core::Triple>| set.iter().map(|t| t.to_string()).collect();
    json_as(
        &headers,
        &DiffBody {
            added: lines(&d.added),
            removed: lines(&d.removed),
        },
    )
}

#[derive(Debug, Deserialize)]
struct RollbackParams {
    version: String,
}

async fn rollback(
    State(hub): State<Shared>,
    Path(prefix): Path<String>,
    params: Result<Query<RollbackParams>, axum::extract::rejection::QueryRejection>,
) -> Result<Response, AppError> {
    let p = query(params)?;
    let record = blocking(hub, move |h| Ok(h.registry.rollback(&prefix, &p.version)?)).await?;
    Ok(Json(record).into_response())
}

async fn tree(State(hub): State<Shared>, Path(prefix): Path<String>, headers: HeaderMap) -> Result<Response, AppError> {
    let kind = choose(&headers, &[JSON, TEXT])?;
    let forest = blocking(hub, move |h| h.tree(&prefix)).await?;
    if kind == TEXT {
        return Ok(with_type(tree_text(&forest.roots), TEXT));
    }
    json_as(&headers, &forest)
}

async fn list_view(
    State(hub): State<Shared>,
    Path(prefix): Path<String>,
    headers: HeaderMap,
) -> Result<Response, AppError> {
    let kind = choose(&headers, &[JSON, HTML])?;
    let (record, view) = blocking(hub, move |h| h.list_view(&prefix)).await?;
    if kind == HTML {
        return Ok(with_type(view.to_html(&record.title), HTML));
    }
    json_as(&headers, &view)
}

async fn vowl(State(hub): State<Shared>, Path(prefix): Path<String>, headers: HeaderMap) -> Result<Response, AppError> {
    let doc = blocking(hub, move |h| h.vowl(&prefix)).await?;
    json_as(&headers, &doc)
}

async fn search(
    State(hub): State<Shared>,
    params: Result<Query<Vec<(String, String)>>, axum::extract::rejection::QueryRejection>,
    headers: HeaderMap,
) -> Result<Response, AppError> {
    let pairs = query(params)?;
    let q = pairs
        .iter()
        .find(|(k, _)| k == "q")
        .map(|(_, v)| v.clone())
        .ok_or_else(|| AppError::BadRequest("missing q parameter".into()))?;
    let facets: Vec<String> = pairs
        .into_iter()
        .filter(|(k, _)| k == "facet")
        .map(|(_, v)| v)
        .collect();
    let hits = blocking(hub, move |h| h.search(&q, &facets)).await?;
    json_as(&headers, &hits)
}

/// Validation when the body names an ontology, statistics otherwise.
async fn validate(State(hub): State<Shared>, headers: HeaderMap, body: Bytes) -> Result<Response, AppError> {
    let req: JobRequest =
        serde_json::from_slice(&body).map_err(|e| AppError::BadRequest(format!("malformed job request: {e}")))?;
    let report = blocking(hub, move |h| h.job(&req)).await?;
    json_as(&headers, &report)
}

#[derive(Debug, Deserialize)]
struct GraphsParams {
    endpoint: String,
    timeout_ms: Option<u64>,
}

async fn endpoint_graphs(
    State(hub): State<Shared>,
    params: Result<Query<GraphsParams>, axum::extract::rejection::QueryRejection>,
    headers: HeaderMap,
) -> Result<Response, AppError> {
    let p = query(params)?;
    let graphs = blocking(hub, move |h| {
        let session = h.session(
            &p.endpoint,
            &[],
            p.timeout_ms.map(std::time::Duration::from_millis),
            None,
        )?;
        h.endpoint_graphs(session)
    })
    .await?;
    json_as(&headers, &graphs)
}
