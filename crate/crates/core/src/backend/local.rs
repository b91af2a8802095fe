use super::{resolve, validate_request, Backend, BackendError, JobRequest};
use crate::compiler::DeviceSpec;
use crate::simulator::{sample_shots, NoiseModel, ShotResult};

/// Runs jobs on the in-process simulator.
#[derive(Debug, Clone)]
pub struct LocalBackend {
    device: DeviceSpec,
    default_noise: Option<NoiseModel>,
}

impl LocalBackend {
    pub fn new(device: DeviceSpec, default_noise: Option<NoiseModel>) -> Self {
        LocalBackend { device, default_noise }
    }
}

impl Backend for LocalBackend {
    fn device(&self) -> &DeviceSpec {
        &self.device
    }

    fn execute(&self, request: &JobRequest) -> Result<ShotResult, BackendError> {
        let circuit = validate_request(request, &self.device)?;
        let (seed, noise) = resolve(request, self.default_noise);
        Ok(sample_shots(&circuit, request.shots, noise.as_ref(), seed)?)
    }
}
