//! A SPARQL endpoint over a local store that answers exactly the queries the
//! validator emits. Reads only; safe for concurrent requests.

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::header::CONTENT_TYPE;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Form, Router};
use ontohub_core::validator::{answer, SPARQL_RESULTS_JSON};
use ontohub_core::Store;

pub const PATH: &str = "/sparql";

pub fn router(store: Arc<Store>) -> Router {
    Router::new().route(PATH, get(via_get).post(via_post)).with_state(store)
}

async fn via_get(State(store): State<Arc<Store>>, Query(params): Query<HashMap<String, String>>) -> Response {
    run(store, params.get("query").cloned()).await
}

async fn via_post(State(store): State<Arc<Store>>, Form(params): Form<HashMap<String, String>>) -> Response {
    run(store, params.get("query").cloned()).await
}

async fn run(store: Arc<Store>, query: Option<String>) -> Response {
    let Some(query) = query else {
        return (StatusCode::BAD_REQUEST, "missing query parameter").into_response();
    };
    let result = tokio::task::spawn_blocking(move || answer(&store.read(), &query)).await;
    match result {
        Ok(Ok(results)) => match serde_json::to_vec(&results) {
            Ok(body) => ([(CONTENT_TYPE, SPARQL_RESULTS_JSON)], body).into_response(),
            Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
        },
        Ok(Err(e)) => (StatusCode::BAD_REQUEST, e.to_string()).into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}
