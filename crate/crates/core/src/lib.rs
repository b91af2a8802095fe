//! Hybrid quantum-classical experiment pipeline.
//!
//! Abstract parametric circuits ([`circuit`]) are compiled for a coupling
//! graph and native gate set ([`compiler`]), executed on a state-vector
//! simulator with optional noise ([`simulator`]) either in process or
//! through a job service ([`backend`]), and tuned by a derivative-free
//! optimizer ([`optimize`]). [`algorithms`] wires these into a quantum
//! autoencoder and an XOR classifier; [`results`] persists their output.

pub mod algorithms;
pub mod backend;
pub mod circuit;
pub mod compiler;
pub mod numfmt;
pub mod optimize;
pub mod results;
pub mod seed;
pub mod simulator;
