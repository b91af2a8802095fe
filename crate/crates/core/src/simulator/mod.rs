//! State-vector execution, exact marginals and seeded shot sampling.
//!
//! Noiseless sampling draws every shot from the exact final distribution.
//! Noisy sampling follows one Pauli trajectory per shot: after each gate a
//! uniformly random non-identity Pauli hits the gate's qubits with the
//! configured probability, and each measured bit then flips independently
//! with the readout probability.
//!
//! Randomness comes from ChaCha8 seeded with the caller's seed. Trajectory
//! `k` uses stream `k` of that seed, so results do not depend on how shots
//! are spread across threads.

mod noise;
mod shots;
mod state;

pub use noise::NoiseModel;
pub use shots::{sample_shots, Bitstring, ShotResult};
pub use state::{probabilities, run_statevector, StateVector, MAX_QUBITS};

use crate::circuit::CircuitError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("shots must be positive")]
    ZeroShots,
    #[error("circuit has no MEASURE instructions")]
    NoMeasurement,
    #[error("qubit {qubit} out of range for a {n}-qubit state")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("{got} qubits exceeds the simulator limit of {limit}")]
    TooManyQubits { got: usize, limit: usize },
    #[error("noise probability {name} = {value} is outside [0, 1]")]
    InvalidNoise { name: &'static str, value: f64 },
}
