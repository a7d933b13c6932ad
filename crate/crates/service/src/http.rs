use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::session::{GameService, ServiceError, Snapshot};

#[derive(Debug, Deserialize)]
pub struct CreateGame {
    pub n: usize,
    pub human: u8,
}

#[derive(Debug, Deserialize)]
pub struct SubmitMove {
    pub r: usize,
    pub c: usize,
}

/// Body of every non-2xx response.
#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conflicts_with: Option<[u8; 2]>,
}

pub struct ApiError(ServiceError);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let e = self.0;
        let (status, code) = match &e {
            ServiceError::SizeOutOfRange(_) | ServiceError::BadSide(_) => {
                (StatusCode::BAD_REQUEST, "bad_request")
            }
            ServiceError::OffBoard { .. } => (StatusCode::BAD_REQUEST, "off_board"),
            ServiceError::UnknownGame(_) => (StatusCode::NOT_FOUND, "unknown_game"),
            ServiceError::NotYourTurn => (StatusCode::CONFLICT, "not_your_turn"),
            ServiceError::GameOver => (StatusCode::CONFLICT, "game_over"),
            ServiceError::IllegalMove { .. } => (StatusCode::CONFLICT, "illegal_move"),
            ServiceError::Engine(_) => (StatusCode::INTERNAL_SERVER_ERROR, "engine_failure"),
        };
        let (constraint, conflicts_with) = match &e {
            ServiceError::IllegalMove { conflict, queen, .. } => {
                (Some(conflict.as_str().to_string()), Some([queen.row, queen.col]))
            }
            _ => (None, None),
        };
        let body = ErrorBody { error: code.into(), message: e.to_string(), constraint, conflicts_with };
        (status, Json(body)).into_response()
    }
}

fn bad_json(rejection: JsonRejection) -> Response {
    let body = ErrorBody {
        error: "bad_request".into(),
        message: rejection.body_text(),
        constraint: None,
        conflicts_with: None,
    };
    (StatusCode::BAD_REQUEST, Json(body)).into_response()
}

type AppState = Arc<GameService>;

/// Runs blocking engine work off the async workers.
async fn blocking<F>(f: F) -> Result<Snapshot, ApiError>
where
    F: FnOnce() -> Result<Snapshot, ServiceError> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(ServiceError::Engine(e.to_string())))?
        .map_err(ApiError)
}

async fn create_game(
    State(service): State<AppState>,
    body: Result<Json<CreateGame>, JsonRejection>,
) -> Response {
    let Json(req) = match body {
        Ok(b) => b,
        Err(r) => return bad_json(r),
    };
    match blocking(move || service.create_game(req.n, req.human)).await {
        Ok(snap) => (StatusCode::CREATED, Json(snap)).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn get_game(
    State(service): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Snapshot>, ApiError> {
    Ok(Json(service.get_game(&id)?))
}

async fn submit_move(
    State(service): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<SubmitMove>, JsonRejection>,
) -> Response {
    let Json(req) = match body {
        Ok(b) => b,
        Err(r) => return bad_json(r),
    };
    match blocking(move || service.submit_move(&id, req.r, req.c)).await {
        Ok(snap) => Json(snap).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn delete_game(State(service): State<AppState>, Path(id): Path<String>) -> StatusCode {
    service.delete_game(&id);
    StatusCode::NO_CONTENT
}

const PLACEHOLDER_PAGE: &str = "<!doctype html>\n<title>qpgame</title>\n\
<p>The web board is not built. The JSON API is available under <code>/api/games</code>.</p>\n";

/// API routes plus static assets from `static_dir` (served at `/` and
/// `/assets/*`), or a placeholder page when no directory is given.
pub fn router(service: Arc<GameService>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/games", post(create_game))
        .route("/api/games/{id}", get(get_game).delete(delete_game))
        .route("/api/games/{id}/moves", post(submit_move))
        .with_state(service);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir).append_index_html_on_directories(true)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER_PAGE) })),
    }
}
