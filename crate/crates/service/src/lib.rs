//! HTTP service over a scheduling store: instances, asynchronous solver
//! runs, fronts, Gantt data and aspiration-level sessions. All payloads are
//! JSON.
//!
//! | Method | Path | |
//! |---|---|---|
//! | GET, POST | `/instances` | list summaries, upload |
//! | GET | `/instances/{name}` | extended-JSON instance |
//! | POST | `/runs` | queue a run |
//! | GET | `/runs/{id}` | state and evaluation count |
//! | GET | `/runs/{id}/front` | `[{id, vector}]` in vector order |
//! | GET | `/runs/{id}/solutions/{sid}/gantt` | per-machine bars |
//! | POST | `/aim` | open a session on a finished run |
//! | GET | `/aim/{id}` | session state |
//! | PATCH | `/aim/{id}/levels/{i}` | set level `i` (1-based) |
//! | POST | `/aim/{id}/finalize` | the single remaining solution |

mod error;
mod gantt;
mod handlers;
mod state;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::routing::{get, patch, post};
use axum::Router;
use paretoshop_core::io::Store;

pub use error::ApiError;
pub use gantt::{Bar, GanttData, MachineLane};
pub use handlers::{Chosen, InstanceSummary, RunStatus, SessionView};
pub use state::{AppState, RunState};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub store: PathBuf,
    pub listen: SocketAddr,
    /// Concurrent solver runs; further runs wait in submission order.
    pub workers: usize,
}

impl ServiceConfig {
    pub fn new(store: impl Into<PathBuf>, listen: SocketAddr) -> Self {
        ServiceConfig {
            store: store.into(),
            listen,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route(
            "/instances",
            get(handlers::list_instances).post(handlers::upload_instance),
        )
        .route("/instances/{name}", get(handlers::get_instance))
        .route("/runs", post(handlers::create_run))
        .route("/runs/{id}", get(handlers::run_status))
        .route("/runs/{id}/front", get(handlers::run_front))
        .route("/runs/{id}/solutions/{sid}/gantt", get(handlers::gantt))
        .route("/aim", post(handlers::create_session))
        .route("/aim/{id}", get(handlers::get_session))
        .route("/aim/{id}/levels/{i}", patch(handlers::set_level))
        .route("/aim/{id}/finalize", post(handlers::finalize))
        .with_state(state)
}

/// Opens the store and serves until the listener fails. `on_bound` receives
/// the bound address, which differs from the configured one for port 0.
pub async fn serve(config: ServiceConfig, on_bound: impl FnOnce(SocketAddr)) -> std::io::Result<()> {
    let store = Store::open(&config.store).map_err(std::io::Error::other)?;
    let state = Arc::new(AppState::new(store, config.workers));
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    let addr = listener.local_addr()?;
    log::info!("serving store {} on {addr}", config.store.display());
    on_bound(addr);
    axum::serve(listener, router(state)).await
}
