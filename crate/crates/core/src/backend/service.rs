use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use tokio::sync::oneshot;

use super::{resolve, validate_request, BackendError, JobRecord, JobRequest, JobStatus};
use crate::compiler::DeviceSpec;
use crate::simulator::{sample_shots, NoiseModel};

struct AppState {
    device: DeviceSpec,
    default_noise: Option<NoiseModel>,
    jobs: Mutex<HashMap<u64, JobRecord>>,
    next_id: AtomicU64,
}

impl AppState {
    fn update(&self, id: u64, f: impl FnOnce(&mut JobRecord)) {
        if let Some(rec) = self.jobs.lock().expect("job table poisoned").get_mut(&id) {
            f(rec);
        }
    }
}

fn error(status: StatusCode, message: impl ToString) -> Response {
    (status, Json(json!({ "error": message.to_string() }))).into_response()
}

async fn submit(State(state): State<Arc<AppState>>, Json(request): Json<JobRequest>) -> Response {
    let circuit = match validate_request(&request, &state.device) {
        Ok(c) => c,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let (seed, noise) = resolve(&request, state.default_noise);
    let id = state.next_id.fetch_add(1, Ordering::Relaxed);
    state.jobs.lock().expect("job table poisoned").insert(
        id,
        JobRecord { id, status: JobStatus::Queued, result: None, error: None },
    );

    let worker = Arc::clone(&state);
    tokio::spawn(async move {
        worker.update(id, |r| r.status = JobStatus::Running);
        let shots = request.shots;
        let outcome = tokio::task::spawn_blocking(move || sample_shots(&circuit, shots, noise.as_ref(), seed)).await;
        worker.update(id, |r| match outcome {
            Ok(Ok(result)) => {
                r.status = JobStatus::Done;
                r.result = Some(result);
            }
            Ok(Err(e)) => {
                r.status = JobStatus::Failed;
                r.error = Some(e.to_string());
            }
            Err(e) => {
                r.status = JobStatus::Failed;
                r.error = Some(format!("worker crashed: {e}"));
            }
        });
    });
    (StatusCode::ACCEPTED, Json(json!({ "id": id }))).into_response()
}

async fn lookup(State(state): State<Arc<AppState>>, Path(id): Path<u64>) -> Response {
    let record = state.jobs.lock().expect("job table poisoned").get(&id).cloned();
    match record {
        Some(r) => Json(r).into_response(),
        None => error(StatusCode::NOT_FOUND, format!("no job with id {id}")),
    }
}

async fn device(State(state): State<Arc<AppState>>) -> Response {
    Json(state.device.clone()).into_response()
}

fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/jobs", post(submit))
        .route("/jobs/{id}", get(lookup))
        .route("/device", get(device))
        .with_state(state)
}

/// A running job service. Dropping the handle stops it.
pub struct ServiceHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl ServiceHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Block until the service stops.
    pub fn wait(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for ServiceHandle {
    fn drop(&mut self) {
        self.stop();
    }
}

/// Start the job service on `addr` (port 0 picks a free port). The service
/// runs on its own thread and runtime; jobs execute on the blocking pool.
pub fn serve(
    addr: &str,
    device: DeviceSpec,
    default_noise: Option<NoiseModel>,
) -> Result<ServiceHandle, BackendError> {
    let addr: SocketAddr = addr
        .parse()
        .map_err(|e| BackendError::Transport(format!("bad bind address {addr:?}: {e}")))?;
    let state = Arc::new(AppState {
        device,
        default_noise,
        jobs: Mutex::new(HashMap::new()),
        next_id: AtomicU64::new(1),
    });
    let (ready_tx, ready_rx) = std::sync::mpsc::channel();
    let (stop_tx, stop_rx) = oneshot::channel::<()>();
    let thread = std::thread::Builder::new()
        .name("hqc-service".into())
        .spawn(move || {
            let runtime = match tokio::runtime::Builder::new_multi_thread().enable_all().build() {
                Ok(rt) => rt,
                Err(e) => {
                    let _ = ready_tx.send(Err(e.to_string()));
                    return;
                }
            };
            runtime.block_on(async move {
                let listener = match tokio::net::TcpListener::bind(addr).await {
                    Ok(l) => l,
                    Err(e) => {
                        let _ = ready_tx.send(Err(format!("cannot bind {addr}: {e}")));
                        return;
                    }
                };
                let local = listener.local_addr().map_err(|e| e.to_string());
                let _ = ready_tx.send(local);
                let _ = axum::serve(listener, router(state))
                    .with_graceful_shutdown(async {
                        let _ = stop_rx.await;
                    })
                    .await;
            });
        })
        .map_err(|e| BackendError::Transport(e.to_string()))?;
    let bound = ready_rx
        .recv()
        .map_err(|_| BackendError::Transport("service thread exited".into()))?
        .map_err(BackendError::Transport)?;
    Ok(ServiceHandle { addr: bound, shutdown: Some(stop_tx), thread: Some(thread) })
}
