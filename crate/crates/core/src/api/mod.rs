//! HTTP/JSON control API.
//!
//! One writer task owns the [`Orchestrator`]; mutating handlers send it a
//! command and await the reply. After every command the writer publishes an
//! immutable snapshot that read handlers serve from concurrently.

mod handlers;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use tokio::sync::{mpsc, oneshot, watch};

use crate::orchestrator::{Orchestrator, PipelineError, PipelineRecord};
use crate::surveillance::SurveillanceError;

pub(crate) enum Command {
    RegisterCase {
        case_id: String,
        at: Option<u64>,
        reply: oneshot::Sender<Result<PipelineRecord, PipelineError>>,
    },
    Ingest {
        body: String,
        reply: oneshot::Sender<Result<usize, SurveillanceError>>,
    },
    Flush {
        at: Option<u64>,
        reply: oneshot::Sender<Result<Option<u64>, PipelineError>>,
    },
}

#[derive(Clone)]
pub struct ApiState {
    snapshot: watch::Receiver<Arc<Orchestrator>>,
    commands: mpsc::Sender<Command>,
}

impl ApiState {
    /// Spawns the writer task on the current Tokio runtime.
    pub fn spawn(orchestrator: Orchestrator) -> Self {
        let (snap_tx, snapshot) = watch::channel(Arc::new(orchestrator.clone()));
        let (commands, mut rx) = mpsc::channel::<Command>(64);
        tokio::spawn(async move {
            let mut orch = orchestrator;
            while let Some(cmd) = rx.recv().await {
                // Publish before replying so a client's follow-up read sees its own write.
                match cmd {
                    Command::RegisterCase { case_id, at, reply } => {
                        let now = at.unwrap_or_else(|| orch.default_now());
                        let out = orch.register_case(&case_id, now);
                        snap_tx.send_replace(Arc::new(orch.clone()));
                        let _ = reply.send(out);
                    }
                    Command::Ingest { body, reply } => {
                        let out = orch.ingest_jsonl(&body);
                        snap_tx.send_replace(Arc::new(orch.clone()));
                        let _ = reply.send(out);
                    }
                    Command::Flush { at, reply } => {
                        let now = at.unwrap_or_else(|| orch.default_now());
                        let out = orch.flush(now);
                        snap_tx.send_replace(Arc::new(orch.clone()));
                        let _ = reply.send(out);
                    }
                }
            }
        });
        Self { snapshot, commands }
    }

    pub fn snapshot(&self) -> Arc<Orchestrator> {
        self.snapshot.borrow().clone()
    }

    pub(crate) async fn submit<T>(&self, make: impl FnOnce(oneshot::Sender<T>) -> Command) -> Option<T> {
        let (tx, rx) = oneshot::channel();
        self.commands.send(make(tx)).await.ok()?;
        rx.await.ok()
    }
}

pub fn router(state: ApiState) -> Router {
    Router::new()
        .route("/health", get(handlers::health))
        .route("/cases", post(handlers::register_case))
        .route("/chain", get(handlers::chain))
        .route("/blocks/flush", post(handlers::flush))
        .route("/blocks/{height}", get(handlers::block))
        .route("/verify", post(handlers::verify))
        .route("/clients/{id}/inbox", get(handlers::inbox))
        .route("/clients/{id}/risk", get(handlers::risk))
        .route("/authority/suspects", get(handlers::suspects))
        .route("/clusters", post(handlers::clusters))
        .route("/ingest/contacts", post(handlers::ingest))
        .with_state(state)
}

/// Serves the API on `addr` until the process exits.
pub async fn serve(orchestrator: Orchestrator, addr: SocketAddr) -> std::io::Result<()> {
    let app = router(ApiState::spawn(orchestrator));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await
}
