//! HTTP/JSON service hosting human-vs-engine games.
//!
//! `POST /api/games {n, human}` opens a game (the engine moves first when the
//! human plays side 2), `POST /api/games/{id}/moves {r, c}` plays a move and
//! returns the position after the engine's answer, `GET` and `DELETE` on
//! `/api/games/{id}` read and drop a game.

pub mod http;
pub mod session;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

pub use http::{router, ErrorBody};
pub use session::{EngineConfig, EnginePlay, GameService, ServiceError, Snapshot, Status};

/// Serves until the listener fails. Returns the bound address first via
/// `on_bound`, which makes port 0 usable.
pub async fn serve(
    listener: tokio::net::TcpListener,
    service: Arc<GameService>,
    static_dir: Option<PathBuf>,
    on_bound: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    on_bound(listener.local_addr()?);
    axum::serve(listener, router(service, static_dir)).await
}
