//! Derivative-free minimization and one-dimensional landscape sweeps.

mod nelder_mead;
mod sweep;

pub use nelder_mead::{nelder_mead, NelderMeadOptions, OptimizeResult, TracePoint};
pub use sweep::{grid_sweep, linspace, Estimate, SweepResult};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OptimizeError<E> {
    #[error("objective returned {value} at {params:?}")]
    NonFinite { params: Vec<f64>, value: f64 },
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("objective failed: {0}")]
    Objective(E),
}
