//! Session service that exposes gridbench environments over HTTP and WebSocket.
//!
//! | Route | Purpose |
//! |---|---|
//! | `POST /sessions` | reset a new environment and return its first observation |
//! | `POST /sessions/{id}/step` | apply `{"action": code}` |
//! | `GET /sessions/{id}/obs` | current observation |
//! | `GET /sessions/{id}/frame.png` | current isometric frame |
//! | `POST /sessions/{id}/finalize` | score the finished episode and append it to the runs ledger |
//! | `GET /tasks` | task catalog |
//! | `WS /sessions/{id}/ws` | every step payload, pushed as it happens |
//!
//! ```no_run
//! # async fn run() -> std::io::Result<()> {
//! use gridbench_envd::{serve, AppState, ServerConfig};
//!
//! let state = AppState::new(ServerConfig::new("envd-data"));
//! let listener = tokio::net::TcpListener::bind("127.0.0.1:8765").await?;
//! serve(listener, state).await
//! # }
//! ```

mod app;
mod config;
mod error;
mod ledger;
mod session;

pub use app::{router, spawn_reaper, AppState, CreateRequest, CreateResponse, StepRequest};
pub use config::{ServerConfig, DEFAULT_IDLE_TIMEOUT, DEFAULT_MAX_SESSIONS};
pub use error::ServiceError;
pub use ledger::{read_ledger, FinalizeResult, LedgerRow};
pub use session::{ObsPayload, StepInfo, StepPayload};

use std::sync::Arc;

/// Serve the API on `listener` with the idle reaper running alongside.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    let reaper = spawn_reaper(state.clone());
    let result = axum::serve(listener, router(state)).await;
    reaper.abort();
    result
}
