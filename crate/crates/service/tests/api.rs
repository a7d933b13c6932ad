use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use qpgame_service::{router, GameService};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

fn app() -> axum::Router {
    router(Arc::new(GameService::default()), None)
}

#[tokio::test]
async fn create_get_move_delete() {
    let app = app();
    let (status, snap) = call(&app, "POST", "/api/games", Some(json!({"n": 5, "human": 2}))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(snap["moves"], json!([[2, 2]]));
    assert_eq!(snap["toMove"], json!(2));
    assert_eq!(snap["status"], json!("in_progress"));
    assert_eq!(snap["enginePlay"], json!("strategy"));
    let id = snap["id"].as_str().unwrap().to_string();

    let (status, snap) = call(&app, "POST", &format!("/api/games/{id}/moves"), Some(json!({"r": 0, "c": 1}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(snap["moves"], json!([[2, 2], [0, 1], [4, 3]]));

    let (status, snap) = call(&app, "GET", &format!("/api/games/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(snap["moves"].as_array().unwrap().len(), 3);

    let (status, _) = call(&app, "DELETE", &format!("/api/games/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = call(&app, "DELETE", &format!("/api/games/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, body) = call(&app, "GET", &format!("/api/games/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"], json!("unknown_game"));
}

#[tokio::test]
async fn illegal_move_is_a_conflict_with_details() {
    let app = app();
    let (_, snap) = call(&app, "POST", "/api/games", Some(json!({"n": 5, "human": 2}))).await;
    let id = snap["id"].as_str().unwrap();
    let (status, body) = call(&app, "POST", &format!("/api/games/{id}/moves"), Some(json!({"r": 0, "c": 0}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"], json!("illegal_move"));
    assert_eq!(body["constraint"], json!("rising diagonal"));
    assert_eq!(body["conflictsWith"], json!([2, 2]));
    let (_, after) = call(&app, "GET", &format!("/api/games/{id}"), None).await;
    assert_eq!(after, snap);
}

#[tokio::test]
async fn bad_requests() {
    let app = app();
    let (status, body) = call(&app, "POST", "/api/games", Some(json!({"n": 40, "human": 1}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], json!("bad_request"));
    let (status, _) = call(&app, "POST", "/api/games", Some(json!({"size": 4}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "POST", "/api/games/nope/moves", Some(json!({"r": 0, "c": 0}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn turn_errors() {
    let app = app();
    let (_, snap) = call(&app, "POST", "/api/games", Some(json!({"n": 4, "human": 2}))).await;
    let id = snap["id"].as_str().unwrap();
    let (_, snap) = call(&app, "POST", &format!("/api/games/{id}/moves"), Some(json!({"r": 2, "c": 3}))).await;
    assert_eq!(snap["status"], json!("finished"));
    assert_eq!(snap["winner"], json!(1));
    let (status, body) = call(&app, "POST", &format!("/api/games/{id}/moves"), Some(json!({"r": 0, "c": 0}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"], json!("game_over"));
}

#[tokio::test]
async fn placeholder_page_without_static_dir() {
    let app = app();
    let resp = app.oneshot(Request::get("/").body(Body::empty()).unwrap()).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
}

#[tokio::test]
async fn static_dir_serves_assets() {
    let dir = std::env::temp_dir().join(format!("qpgame-static-{}", std::process::id()));
    std::fs::create_dir_all(dir.join("assets")).unwrap();
    std::fs::write(dir.join("index.html"), "<p>board</p>").unwrap();
    std::fs::write(dir.join("assets/app.js"), "console.log(1)").unwrap();
    let app = router(Arc::new(GameService::default()), Some(dir.clone()));
    for (uri, expected) in [("/", "<p>board</p>"), ("/assets/app.js", "console.log(1)")] {
        let resp = app.clone().oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
        assert_eq!(resp.status(), StatusCode::OK, "{uri}");
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        assert_eq!(&bytes[..], expected.as_bytes());
    }
    std::fs::remove_dir_all(dir).ok();
}

#[tokio::test]
async fn serve_binds_ephemeral_port() {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let (tx, rx) = tokio::sync::oneshot::channel();
    let service = Arc::new(GameService::default());
    tokio::spawn(qpgame_service::serve(listener, service, None, move |addr| {
        tx.send(addr).unwrap();
    }));
    let addr = rx.await.unwrap();
    assert_ne!(addr.port(), 0);
    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    stream
        .write_all(b"GET /api/games/missing HTTP/1.1\r\nhost: x\r\nconnection: close\r\n\r\n")
        .await
        .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).await.unwrap();
    assert!(response.starts_with("HTTP/1.1 404"), "{response}");
}
