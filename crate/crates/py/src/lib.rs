//! Python bindings: circuits, compilation, shot sampling, the job service
//! and the experiment runner.

use std::collections::BTreeMap;
use std::sync::Mutex;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hqc::backend::{Backend, JobRequest, RemoteBackend, ServiceHandle};
use hqc::circuit::{parse_program, print_program};
use hqc::results::{ResultFile, RunConfig};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// An immutable circuit parsed from `.qp` text.
#[pyclass(frozen, from_py_object, name = "Circuit")]
#[derive(Clone)]
struct Circuit(hqc::circuit::Circuit);

#[pymethods]
impl Circuit {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_program(text).map(Circuit).map_err(value_err)
    }

    fn to_text(&self) -> String {
        print_program(&self.0)
    }

    fn __str__(&self) -> String {
        self.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Circuit(<{} instructions>)", self.0.len())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    #[getter]
    fn is_physical(&self) -> bool {
        self.0.is_physical()
    }

    fn free_symbols(&self) -> Vec<String> {
        self.0.free_symbols().into_iter().collect()
    }

    fn abstract_qubits(&self) -> Vec<String> {
        self.0.abstract_qubits()
    }

    fn bind(&self, values: BTreeMap<String, f64>) -> PyResult<Self> {
        self.0.bind_parameters(&values).map(Circuit).map_err(value_err)
    }
}

#[pyclass(frozen, from_py_object, name = "Device")]
#[derive(Clone)]
struct Device(hqc::compiler::DeviceSpec);

#[pymethods]
impl Device {
    /// A built-in device name or a path to a device JSON file.
    #[staticmethod]
    fn resolve(name_or_path: &str) -> PyResult<Self> {
        hqc::compiler::DeviceSpec::resolve(name_or_path).map(Device).map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        hqc::compiler::DeviceSpec::from_json(text).map(Device).map_err(value_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().collect()
    }
}

#[pyclass(frozen, from_py_object, name = "NoiseModel")]
#[derive(Clone, Copy)]
struct NoiseModel(hqc::simulator::NoiseModel);

#[pymethods]
impl NoiseModel {
    #[new]
    #[pyo3(signature = (p1 = 0.0, p2 = 0.0, readout_flip = 0.0))]
    fn new(p1: f64, p2: f64, readout_flip: f64) -> PyResult<Self> {
        hqc::simulator::NoiseModel::new(p1, p2, readout_flip).map(NoiseModel).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        let n = self.0;
        format!("NoiseModel(p1={}, p2={}, readout_flip={})", n.p1, n.p2, n.readout_flip)
    }
}

#[pyclass(frozen, name = "CompiledCircuit")]
struct CompiledCircuit(hqc::compiler::CompiledCircuit);

#[pymethods]
impl CompiledCircuit {
    #[getter]
    fn circuit(&self) -> Circuit {
        Circuit(self.0.circuit.clone())
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth
    }

    #[getter]
    fn swaps(&self) -> usize {
        self.0.swaps
    }

    #[getter]
    fn gate_counts(&self) -> BTreeMap<String, usize> {
        self.0.gate_counts.iter().map(|(k, n)| (k.name().to_string(), *n)).collect()
    }

    #[getter]
    fn initial_map(&self) -> BTreeMap<String, usize> {
        self.0.initial_map.clone()
    }

    #[getter]
    fn final_permutation(&self) -> Vec<usize> {
        self.0.final_permutation.clone()
    }

    fn bind(&self, values: BTreeMap<String, f64>) -> PyResult<Self> {
        self.0.bind(&values).map(CompiledCircuit).map_err(value_err)
    }
}

#[pyclass(frozen, name = "ShotResult")]
struct ShotResult(hqc::simulator::ShotResult);

#[pymethods]
impl ShotResult {
    #[getter]
    fn shots(&self) -> usize {
        self.0.shots
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    /// One string per shot; character j is classical bit j.
    #[getter]
    fn bitstrings(&self) -> Vec<String> {
        self.0.bitstrings.iter().map(|b| b.to_string()).collect()
    }

    fn counts(&self) -> BTreeMap<String, usize> {
        self.0.counts().into_iter().map(|(b, n)| (b.to_string(), n)).collect()
    }

    fn fraction_all_zero(&self) -> f64 {
        self.0.fraction_all_zero()
    }
}

/// A job service running on a background thread.
#[pyclass(name = "Service")]
struct Service {
    url: String,
    handle: Mutex<Option<ServiceHandle>>,
}

#[pymethods]
impl Service {
    #[new]
    #[pyo3(signature = (addr = "127.0.0.1:0", device = None, noise = None))]
    fn new(addr: &str, device: Option<Device>, noise: Option<NoiseModel>) -> PyResult<Self> {
        let device = device.map_or_else(hqc::compiler::DeviceSpec::agave8, |d| d.0);
        let handle = hqc::backend::serve(addr, device, noise.map(|n| n.0)).map_err(runtime_err)?;
        Ok(Service { url: handle.url(), handle: Mutex::new(Some(handle)) })
    }

    #[getter]
    fn url(&self) -> String {
        self.url.clone()
    }

    fn shutdown(&self, py: Python<'_>) {
        let handle = self.handle.lock().unwrap().take();
        py.detach(move || drop(handle));
    }
}

#[pyfunction]
fn compile(py: Python<'_>, circuit: &Circuit, device: &Device) -> PyResult<CompiledCircuit> {
    py.detach(|| hqc::compiler::compile(&circuit.0, &device.0))
        .map(CompiledCircuit)
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (circuit, shots, noise = None, seed = 0))]
fn sample_shots(py: Python<'_>, circuit: &Circuit, shots: usize, noise: Option<NoiseModel>, seed: u64) -> PyResult<ShotResult> {
    let noise = noise.map(|n| n.0);
    py.detach(|| hqc::simulator::sample_shots(&circuit.0, shots, noise.as_ref(), seed))
        .map(ShotResult)
        .map_err(value_err)
}

/// Exact outcome probabilities over all physical qubits of a bound circuit,
/// keyed by little-endian basis index. Zero entries are omitted.
#[pyfunction]
fn probabilities(circuit: &Circuit) -> PyResult<BTreeMap<usize, f64>> {
    let state = hqc::simulator::run_statevector(&circuit.0).map_err(value_err)?;
    let all: Vec<usize> = (0..state.n_qubits()).collect();
    hqc::simulator::probabilities(&state, &all).map_err(value_err)
}

/// Submit a physical program to a running service and wait for the result.
#[pyfunction]
#[pyo3(signature = (url, program, shots, seed = None, noise = None))]
fn execute_remote(
    py: Python<'_>,
    url: &str,
    program: &str,
    shots: usize,
    seed: Option<u64>,
    noise: Option<NoiseModel>,
) -> PyResult<ShotResult> {
    py.detach(|| {
        let backend = RemoteBackend::connect(url)?;
        let mut request = JobRequest::new(program, shots).with_noise(noise.map(|n| n.0));
        if let Some(s) = seed {
            request = request.with_seed(s);
        }
        backend.execute(&request)
    })
    .map(ShotResult)
    .map_err(runtime_err)
}

/// Closed-form classifier output probability.
#[pyfunction]
fn p1_analytic(theta0: f64, theta1: f64, w0: f64) -> f64 {
    hqc::algorithms::p1_analytic(theta0, theta1, w0)
}

/// Run an experiment described by a run-config JSON document and return
/// the result file as JSON.
#[pyfunction]
#[pyo3(signature = (config_json, force_local = false))]
fn run_experiment(py: Python<'_>, config_json: &str, force_local: bool) -> PyResult<String> {
    let config: RunConfig = serde_json::from_str(config_json).map_err(value_err)?;
    py.detach(|| ResultFile::produce(config, force_local))
        .map(|f| f.to_json())
        .map_err(runtime_err)
}

/// Re-run a result file's configuration; true when the payload matches.
#[pyfunction]
#[pyo3(signature = (result_json, force_local = false))]
fn replay(py: Python<'_>, result_json: &str, force_local: bool) -> PyResult<bool> {
    let file = ResultFile::from_json(result_json).map_err(value_err)?;
    py.detach(|| hqc::results::replay(&file, force_local))
        .map(|(same, _)| same)
        .map_err(runtime_err)
}

#[pymodule]
#[pyo3(name = "hqc")]
fn hqc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Circuit>()?;
    m.add_class::<Device>()?;
    m.add_class::<NoiseModel>()?;
    m.add_class::<CompiledCircuit>()?;
    m.add_class::<ShotResult>()?;
    m.add_class::<Service>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(sample_shots, m)?)?;
    m.add_function(wrap_pyfunction!(probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(execute_remote, m)?)?;
    m.add_function(wrap_pyfunction!(p1_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    Ok(())
}
