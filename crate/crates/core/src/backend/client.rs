use std::time::{Duration, Instant};

use reqwest::blocking::{Client, Response};
use reqwest::StatusCode;
use serde::Deserialize;

use super::{validate_request, Backend, BackendError, JobRecord, JobRequest, JobStatus};
use crate::compiler::DeviceSpec;
use crate::simulator::ShotResult;

/// Client for a running job service.
#[derive(Debug, Clone)]
pub struct RemoteBackend {
    base: String,
    client: Client,
    device: DeviceSpec,
    timeout: Duration,
}

#[derive(Deserialize)]
struct Submitted {
    id: u64,
}

#[derive(Deserialize)]
struct ErrorBody {
    error: String,
}

fn transport(e: reqwest::Error) -> BackendError {
    BackendError::Transport(e.to_string())
}

fn error_message(resp: Response) -> String {
    let status = resp.status();
    resp.json::<ErrorBody>()
        .map(|b| b.error)
        .unwrap_or_else(|_| format!("HTTP {status}"))
}

impl RemoteBackend {
    /// Connect to the service at `url` and fetch its device.
    pub fn connect(url: &str) -> Result<Self, BackendError> {
        let base = url.trim_end_matches('/').to_string();
        let client = Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(transport)?;
        let resp = client.get(format!("{base}/device")).send().map_err(transport)?;
        if !resp.status().is_success() {
            return Err(BackendError::Transport(error_message(resp)));
        }
        let device = resp.json::<DeviceSpec>().map_err(transport)?;
        Ok(RemoteBackend { base, client, device, timeout: Duration::from_secs(600) })
    }

    /// Longest time [`Backend::execute`] waits for a job to finish.
    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn url(&self) -> &str {
        &self.base
    }

    /// Submit without waiting. The program is validated locally first.
    pub fn submit(&self, request: &JobRequest) -> Result<u64, BackendError> {
        validate_request(request, &self.device)?;
        let resp = self
            .client
            .post(format!("{}/jobs", self.base))
            .json(request)
            .send()
            .map_err(transport)?;
        match resp.status() {
            s if s.is_success() => Ok(resp.json::<Submitted>().map_err(transport)?.id),
            s if s.is_client_error() => Err(BackendError::Rejected(error_message(resp))),
            _ => Err(BackendError::Transport(error_message(resp))),
        }
    }

    pub fn status(&self, id: u64) -> Result<JobRecord, BackendError> {
        let resp = self
            .client
            .get(format!("{}/jobs/{id}", self.base))
            .send()
            .map_err(transport)?;
        match resp.status() {
            StatusCode::NOT_FOUND => Err(BackendError::NotFound(id)),
            s if s.is_success() => resp.json::<JobRecord>().map_err(transport),
            _ => Err(BackendError::Transport(error_message(resp))),
        }
    }

    /// Poll until the job is done or failed, backing off from 1 ms to 50 ms.
    pub fn wait(&self, id: u64) -> Result<ShotResult, BackendError> {
        let start = Instant::now();
        let mut delay = Duration::from_millis(1);
        loop {
            let record = self.status(id)?;
            match record.status {
                JobStatus::Done => {
                    return record.result.ok_or_else(|| BackendError::JobFailed {
                        id,
                        message: "done without a result".into(),
                    })
                }
                JobStatus::Failed => {
                    return Err(BackendError::JobFailed {
                        id,
                        message: record.error.unwrap_or_default(),
                    })
                }
                JobStatus::Queued | JobStatus::Running => {}
            }
            if start.elapsed() > self.timeout {
                return Err(BackendError::Timeout(id));
            }
            std::thread::sleep(delay);
            delay = (delay * 2).min(Duration::from_millis(50));
        }
    }
}

impl Backend for RemoteBackend {
    fn device(&self) -> &DeviceSpec {
        &self.device
    }

    fn execute(&self, request: &JobRequest) -> Result<ShotResult, BackendError> {
        let id = self.submit(request)?;
        self.wait(id)
    }
}
