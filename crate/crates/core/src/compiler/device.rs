use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::{GateKind, Instruction, Param};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeviceError {
    #[error("device must have at least one qubit")]
    NoQubits,
    #[error("edge ({0}, {1}) references a qubit outside the device")]
    EdgeOutOfRange(usize, usize),
    #[error("self-loop on qubit {0}")]
    SelfLoop(usize),
    #[error("fidelity {value} for {what} is outside [0, 1]")]
    BadFidelity { what: String, value: f64 },
    #[error("fidelity given for ({0}, {1}), which is not an edge")]
    UnknownEdge(usize, usize),
    #[error("coupling graph is not connected")]
    Disconnected,
    #[error("expected {expected} qubit fidelities, got {got}")]
    FidelityCount { expected: usize, got: usize },
    #[error("device file: {0}")]
    Io(String),
    #[error("device file: {0}")]
    Format(String),
}

/// Gates a device executes directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NativeGate {
    /// RZ with any angle, including symbolic ones.
    #[serde(rename = "RZ")]
    Rz,
    /// RX with a constant angle that is an integer multiple of π/2.
    #[serde(rename = "RX(k*pi/2)")]
    RxHalfPi,
    #[serde(rename = "CZ")]
    Cz,
    #[serde(rename = "MEASURE")]
    Measure,
}

impl NativeGate {
    pub const FOREST: [NativeGate; 4] = [
        NativeGate::Rz,
        NativeGate::RxHalfPi,
        NativeGate::Cz,
        NativeGate::Measure,
    ];

    pub fn admits(self, instr: &Instruction) -> bool {
        match (self, instr.kind) {
            (NativeGate::Rz, GateKind::RZ) => true,
            (NativeGate::RxHalfPi, GateKind::RX) => match instr.params[0] {
                Param::Const(v) => is_half_pi_multiple(v),
                Param::Symbol { .. } => false,
            },
            (NativeGate::Cz, GateKind::CZ) => true,
            (NativeGate::Measure, GateKind::MEASURE) => true,
            _ => false,
        }
    }
}

pub(crate) fn is_half_pi_multiple(angle: f64) -> bool {
    let k = angle / FRAC_PI_2;
    (k - k.round()).abs() < 1e-9
}

/// A target device: coupling graph, native gates and calibration data.
///
/// Edges are undirected and stored as `(low, high)` pairs. Fidelities missing
/// from a device file default to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DeviceFile", into = "DeviceFile")]
pub struct DeviceSpec {
    name: String,
    n_qubits: usize,
    edges: BTreeSet<(usize, usize)>,
    native: Vec<NativeGate>,
    qubit_fidelity: Vec<f64>,
    edge_fidelity: BTreeMap<(usize, usize), f64>,
    adjacency: Vec<Vec<usize>>,
}

/// On-disk JSON schema of a [`DeviceSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceFile {
    pub name: String,
    pub n_qubits: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default = "forest_natives")]
    pub native: Vec<NativeGate>,
    #[serde(default)]
    pub qubit_fidelity: Option<Vec<f64>>,
    /// `[a, b, fidelity]` triples.
    #[serde(default)]
    pub edge_fidelity: Vec<(usize, usize, f64)>,
}

fn forest_natives() -> Vec<NativeGate> {
    NativeGate::FOREST.to_vec()
}

fn norm_edge(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl TryFrom<DeviceFile> for DeviceSpec {
    type Error = DeviceError;

    fn try_from(f: DeviceFile) -> Result<Self, DeviceError> {
        if f.n_qubits == 0 {
            return Err(DeviceError::NoQubits);
        }
        let n = f.n_qubits;
        let mut edges = BTreeSet::new();
        for &(a, b) in &f.edges {
            if a >= n || b >= n {
                return Err(DeviceError::EdgeOutOfRange(a, b));
            }
            if a == b {
                return Err(DeviceError::SelfLoop(a));
            }
            edges.insert(norm_edge(a, b));
        }
        let qubit_fidelity = f.qubit_fidelity.unwrap_or_else(|| vec![1.0; n]);
        if qubit_fidelity.len() != n {
            return Err(DeviceError::FidelityCount {
                expected: n,
                got: qubit_fidelity.len(),
            });
        }
        for (q, &v) in qubit_fidelity.iter().enumerate() {
            check_fidelity(v, || format!("qubit {q}"))?;
        }
        let mut edge_fidelity: BTreeMap<_, _> = edges.iter().map(|&e| (e, 1.0)).collect();
        for &(a, b, v) in &f.edge_fidelity {
            let e = norm_edge(a, b);
            if !edges.contains(&e) {
                return Err(DeviceError::UnknownEdge(a, b));
            }
            check_fidelity(v, || format!("edge ({a}, {b})"))?;
            edge_fidelity.insert(e, v);
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let device = DeviceSpec {
            name: f.name,
            n_qubits: n,
            edges,
            native: f.native,
            qubit_fidelity,
            edge_fidelity,
            adjacency,
        };
        if device.distances_from(0).iter().any(Option::is_none) {
            return Err(DeviceError::Disconnected);
        }
        Ok(device)
    }
}

impl From<DeviceSpec> for DeviceFile {
    fn from(d: DeviceSpec) -> Self {
        DeviceFile {
            name: d.name,
            n_qubits: d.n_qubits,
            edges: d.edges.into_iter().collect(),
            native: d.native,
            qubit_fidelity: Some(d.qubit_fidelity),
            edge_fidelity: d
                .edge_fidelity
                .into_iter()
                .map(|((a, b), v)| (a, b, v))
                .collect(),
        }
    }
}

fn check_fidelity(v: f64, what: impl FnOnce() -> String) -> Result<(), DeviceError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(DeviceError::BadFidelity { what: what(), value: v })
    }
}

impl DeviceSpec {
    pub fn new(file: DeviceFile) -> Result<Self, DeviceError> {
        DeviceSpec::try_from(file)
    }

    /// Eight qubits on a ring 0-1-...-7-0 with the Forest native gate set
    /// and unit fidelities.
    pub fn agave8() -> Self {
        DeviceSpec::new(DeviceFile {
            name: "agave8".into(),
            n_qubits: 8,
            edges: (0..8).map(|i| (i, (i + 1) % 8)).collect(),
            native: forest_natives(),
            qubit_fidelity: None,
            edge_fidelity: vec![],
        })
        .expect("built-in device is valid")
    }

    /// A built-in device by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "agave8" => Some(DeviceSpec::agave8()),
            _ => None,
        }
    }

    /// A built-in name, or else a path to a JSON device file.
    pub fn resolve(name_or_path: &str) -> Result<Self, DeviceError> {
        match DeviceSpec::builtin(name_or_path) {
            Some(d) => Ok(d),
            None => DeviceSpec::load(name_or_path),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DeviceError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| DeviceError::Io(format!("{}: {e}", path.as_ref().display())))?;
        DeviceSpec::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, DeviceError> {
        serde_json::from_str(text).map_err(|e| DeviceError::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn native_gates(&self) -> &[NativeGate] {
        &self.native
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&norm_edge(a, b))
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn qubit_fidelity(&self, q: usize) -> f64 {
        self.qubit_fidelity[q]
    }

    /// Fidelity of an edge, or `None` when the qubits are not coupled.
    pub fn edge_fidelity(&self, a: usize, b: usize) -> Option<f64> {
        self.edge_fidelity.get(&norm_edge(a, b)).copied()
    }

    pub fn is_native(&self, instr: &Instruction) -> bool {
        self.native.iter().any(|g| g.admits(instr))
    }

    pub(crate) fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_qubits];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("visited");
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// A shortest path `from → to` by BFS, preferring lower-indexed neighbors.
    pub fn shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut prev = vec![usize::MAX; self.n_qubits];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &v in &self.adjacency[u] {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}
