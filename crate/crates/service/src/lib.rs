//! HTTP session server for the hidden-single experiment.
//!
//! The server owns all task logic: clients post participant inputs and get
//! back the next screen to render. Sessions are persisted as append-only
//! journals and rebuilt by replay on start-up.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | POST | `/sessions` | `{"seed": u64}` or empty | 201, first screen |
//! | GET | `/sessions/{id}/screen` | | current screen |
//! | POST | `/sessions/{id}/events` | an input, tagged by `kind` | next screen |
//! | GET | `/export.csv` | query `phase`, `session`, `finished_only` | per-trial CSV |
//! | GET | `/healthz` | | status |
//!
//! Unknown sessions give 404, inputs the protocol rejects give 409, and
//! malformed bodies give 400. All times are server milliseconds since the
//! Unix epoch.

pub mod routes;
pub mod store;

use std::net::SocketAddr;
use std::sync::Arc;

pub use routes::{router, CreateRequest, ErrorBody, EventRequest, Health};
pub use store::{Clock, ExportFilter, ManualClock, SessionStore, StoreConfig, StoreError, SystemClock};

/// Serves until the process receives Ctrl-C.
pub async fn serve(store: Arc<SessionStore>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    serve_on(store, listener).await
}

pub async fn serve_on(store: Arc<SessionStore>, listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
