//! The two end-to-end experiments: a 2-1-2 quantum autoencoder and a
//! two-qubit XOR classifier.
//!
//! Both compile their parametric circuit once per data point with the
//! trainable angles left symbolic, then bind and execute on every objective
//! call. Execution goes through a [`Target`]: exact probabilities from the
//! state vector of the compiled circuit, or shot estimates from a backend.
//! Shot seeds are derived from the configured seed, the parameters and the
//! data index, so every objective is a deterministic function.

mod classifier;
mod qae;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::backend::{Backend, BackendError, JobRequest};
use crate::circuit::{print_program, Circuit, CircuitError};
use crate::compiler::{CompileError, DeviceSpec};
use crate::optimize::OptimizeResult;
use crate::simulator::{run_statevector, NoiseModel, SimError};

pub use classifier::{
    accuracy, classifier_circuit, classifier_train, cross_entropy_loss, decision_grid, p1_analytic, xor_dataset,
    ClassifierProblem, GridSource, XorDataset, XorVariant, DEFAULT_EPS,
};
pub use qae::{qae_build_circuit, qae_cost, qae_dataset, qae_sweep, qae_train, QaeConfig, QaeDataset, QaeMode, QaeProblem, Subset};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgoError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("optimizer: {0}")]
    Optimize(String),
    #[error("{0}")]
    Invalid(String),
}

/// Where circuits run.
#[derive(Clone)]
pub enum Target {
    /// Exact outcome probabilities of the compiled circuit on `device`.
    Exact(DeviceSpec),
    /// Shot estimates through a backend.
    Sampled {
        backend: Arc<dyn Backend>,
        shots: usize,
        noise: Option<NoiseModel>,
    },
}

impl fmt::Debug for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Exact(d) => f.debug_tuple("Exact").field(&d.name()).finish(),
            Target::Sampled { backend, shots, noise } => f
                .debug_struct("Sampled")
                .field("device", &backend.device().name())
                .field("shots", shots)
                .field("noise", noise)
                .finish(),
        }
    }
}

/// Serializable description of a [`Target`] for result files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetInfo {
    pub device: String,
    /// `None` for exact evaluation.
    pub shots: Option<usize>,
    pub noise: Option<NoiseModel>,
}

impl Target {
    pub fn sampled(backend: Arc<dyn Backend>, shots: usize, noise: Option<NoiseModel>) -> Result<Self, AlgoError> {
        if shots == 0 {
            return Err(AlgoError::Invalid("shots must be positive".into()));
        }
        Ok(Target::Sampled { backend, shots, noise })
    }

    pub fn device(&self) -> &DeviceSpec {
        match self {
            Target::Exact(d) => d,
            Target::Sampled { backend, .. } => backend.device(),
        }
    }

    pub fn shots(&self) -> Option<usize> {
        match self {
            Target::Exact(_) => None,
            Target::Sampled { shots, .. } => Some(*shots),
        }
    }

    pub fn info(&self) -> TargetInfo {
        TargetInfo {
            device: self.device().name().to_string(),
            shots: self.shots(),
            noise: match self {
                Target::Exact(_) => None,
                Target::Sampled { noise, .. } => *noise,
            },
        }
    }

    /// Probability that the measured bits (clbit order, little-endian) read
    /// `outcome`, for a bound, compiled circuit.
    pub fn outcome_probability(&self, circuit: &Circuit, outcome: usize, seed: u64) -> Result<f64, AlgoError> {
        match self {
            Target::Exact(_) => {
                let measured: Vec<usize> = circuit
                    .measurements()
                    .iter()
                    .filter_map(|(q, _)| q.physical_index())
                    .collect();
                let state = run_statevector(circuit)?;
                Ok(state.marginal(&measured)?[outcome])
            }
            Target::Sampled { backend, shots, noise } => {
                let request = JobRequest::new(print_program(circuit), *shots)
                    .with_noise(*noise)
                    .with_seed(seed);
                let result = backend.execute(&request)?;
                let hits = result.bitstrings.iter().filter(|b| b.value() == outcome).count();
                Ok(hits as f64 / result.shots as f64)
            }
        }
    }
}

/// Binomial standard error of the mean of independent frequency estimates,
/// each from `shots` trials. Zero for exact evaluation.
pub(crate) fn mean_stderr(ps: &[f64], shots: Option<usize>) -> f64 {
    match shots {
        None => 0.0,
        Some(n) => {
            let var: f64 = ps.iter().map(|p| p * (1.0 - p) / n as f64).sum();
            var.sqrt() / ps.len() as f64
        }
    }
}

/// Training outcome shared by both experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub optimize: OptimizeResult,
    /// Objective re-evaluated at the best parameters.
    pub train_loss: f64,
    pub train_stderr: f64,
    pub test_loss: Option<f64>,
    pub test_stderr: Option<f64>,
    /// Fraction of training points classified correctly (classifier only).
    pub accuracy: Option<f64>,
    pub target: TargetInfo,
    pub seed: u64,
}
