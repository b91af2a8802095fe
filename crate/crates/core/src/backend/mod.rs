//! Job submission over two execution targets: an in-process simulator and
//! an HTTP job service with a polling client.
//!
//! Wire schema (JSON bodies):
//!
//! ```text
//! POST /jobs       {"program": "...", "shots": 1000, "seed": 7,
//!                   "noise": {"p1": 0.0, "p2": 0.0, "readout_flip": 0.0}}
//!                  -> 202 {"id": 3}            | 400 {"error": "..."}
//! GET  /jobs/{id}  -> 200 {"id": 3, "status": "queued|running|done|failed",
//!                          "result": {"bitstrings": ["01", ...], "shots": 1000, "seed": 7},
//!                          "error": null}      | 404 {"error": "..."}
//! GET  /device     -> 200 device file JSON
//! ```
//!
//! `seed` and `noise` are optional. A missing seed is drawn at submission
//! and echoed in the result; a missing noise model falls back to the
//! target's default.

mod client;
mod local;
mod service;

use serde::{Deserialize, Serialize};

use crate::circuit::{parse_program, Circuit, ParseError, Qubit};
use crate::compiler::DeviceSpec;
use crate::simulator::{NoiseModel, ShotResult, SimError};

pub use client::RemoteBackend;
pub use local::LocalBackend;
pub use service::{serve, ServiceHandle};

/// Environment variable naming the default service URL.
pub const SERVICE_ENV: &str = "HQC_SERVICE";
pub const DEFAULT_SERVICE_URL: &str = "http://127.0.0.1:8765";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobRequest {
    pub program: String,
    pub shots: usize,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl JobRequest {
    pub fn new(program: impl Into<String>, shots: usize) -> Self {
        JobRequest { program: program.into(), shots, noise: None, seed: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_noise(mut self, noise: Option<NoiseModel>) -> Self {
        self.noise = noise;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    Queued,
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub id: u64,
    pub status: JobStatus,
    pub result: Option<ShotResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BackendError {
    #[error("program does not parse: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid job: {0}")]
    Invalid(String),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error("transport: {0}")]
    Transport(String),
    #[error("service rejected the job: {0}")]
    Rejected(String),
    #[error("job {0} not found")]
    NotFound(u64),
    #[error("job {id} failed: {message}")]
    JobFailed { id: u64, message: String },
    #[error("timed out waiting for job {0}")]
    Timeout(u64),
}

/// An execution target for jobs.
pub trait Backend: Send + Sync {
    fn device(&self) -> &DeviceSpec;

    fn execute(&self, request: &JobRequest) -> Result<ShotResult, BackendError>;
}

/// Check a request against a device and return the parsed circuit.
///
/// The program must be bound and physical, measure at least one qubit, stay
/// on the device, and put every two-qubit gate on a coupled pair.
pub fn validate_request(request: &JobRequest, device: &DeviceSpec) -> Result<Circuit, BackendError> {
    if request.shots == 0 {
        return Err(SimError::ZeroShots.into());
    }
    let circuit = parse_program(&request.program)?;
    let invalid = |e: &dyn std::fmt::Display| BackendError::Invalid(e.to_string());
    circuit.require_physical().map_err(|e| invalid(&e))?;
    circuit.require_bound().map_err(|e| invalid(&e))?;
    if circuit.measurements().is_empty() {
        return Err(SimError::NoMeasurement.into());
    }
    for instr in circuit.instructions() {
        let idx: Vec<usize> = instr.qubits.iter().filter_map(Qubit::physical_index).collect();
        if let Some(q) = idx.iter().find(|&&q| q >= device.n_qubits()) {
            return Err(BackendError::Invalid(format!(
                "qubit {q} is not on device {} ({} qubits)",
                device.name(),
                device.n_qubits()
            )));
        }
        if let [a, b] = idx[..] {
            if !device.has_edge(a, b) {
                return Err(BackendError::Invalid(format!(
                    "{} {a} {b} is not on a coupled pair of device {}",
                    instr.kind,
                    device.name()
                )));
            }
        }
    }
    Ok(circuit)
}

/// Fill in the seed and noise a job will actually run with.
pub(crate) fn resolve(request: &JobRequest, default_noise: Option<NoiseModel>) -> (u64, Option<NoiseModel>) {
    let seed = request.seed.unwrap_or_else(rand::random);
    (seed, request.noise.or(default_noise))
}
