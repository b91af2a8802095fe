//! Helpers shared by the integration tests: random circuit construction and
//! the state-fidelity oracle for compiled circuits.

#![allow(dead_code)]

use std::collections::BTreeMap;

use hqc::circuit::{Circuit, GateKind, Instruction, Param, Qubit};
use hqc::compiler::{CompiledCircuit, DeviceSpec};
use hqc::simulator::run_statevector;
use num_complex::Complex64;
use rand::Rng;

pub const GATE_KINDS: [GateKind; 11] = [
    GateKind::I,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::H,
    GateKind::RX,
    GateKind::RY,
    GateKind::RZ,
    GateKind::CNOT,
    GateKind::CZ,
    GateKind::SWAP,
];

/// One gate over logical slots `a` and `b` (`b` is ignored by 1q gates).
#[derive(Debug, Clone, Copy)]
pub struct GateSpec {
    pub kind: GateKind,
    pub a: usize,
    pub b: usize,
    pub angle: f64,
}

/// How logical slots become qubit references.
#[derive(Debug, Clone)]
pub enum Slots {
    /// `%q0`, `%q1`, …
    Abstract,
    /// Slot `i` is physical qubit `indices[i]`.
    Physical(Vec<usize>),
}

impl Slots {
    fn qubit(&self, i: usize) -> Qubit {
        match self {
            Slots::Abstract => Qubit::Abstract(format!("q{i}")),
            Slots::Physical(p) => Qubit::Physical(p[i]),
        }
    }
}

/// Build a circuit from gate specs, measuring every touched slot at the end.
pub fn build(gates: &[GateSpec], slots: &Slots) -> Circuit {
    let mut instrs = Vec::new();
    let mut touched = std::collections::BTreeSet::new();
    for g in gates {
        let qa = slots.qubit(g.a);
        touched.insert(g.a);
        let instr = match g.kind.num_qubits() {
            2 => {
                touched.insert(g.b);
                Instruction::two(g.kind, qa, slots.qubit(g.b))
            }
            _ if g.kind.num_params() == 1 => Instruction::rotation(g.kind, Param::Const(g.angle), qa),
            _ => Instruction::one(g.kind, qa),
        };
        instrs.push(instr);
    }
    for (clbit, &s) in touched.iter().enumerate() {
        instrs.push(Instruction::measure(slots.qubit(s), clbit));
    }
    Circuit::new(instrs).expect("valid random circuit")
}

/// Up to `max_qubits` slots and 1..=`max_gates` gates.
pub fn random_gates(rng: &mut impl Rng, max_qubits: usize, max_gates: usize) -> (usize, Vec<GateSpec>) {
    let n = rng.random_range(1..=max_qubits);
    let len = rng.random_range(1..=max_gates);
    let gates = (0..len)
        .map(|_| {
            let mut kind = GATE_KINDS[rng.random_range(0..GATE_KINDS.len())];
            if n == 1 && kind.num_qubits() == 2 {
                kind = GateKind::H;
            }
            let a = rng.random_range(0..n);
            let b = if n > 1 { (a + rng.random_range(1..n)) % n } else { a };
            GateSpec { kind, a, b, angle: rng.random_range(-7.0..7.0) }
        })
        .collect();
    (n, gates)
}

/// Random distinct physical indices on `device`.
pub fn random_slots(rng: &mut impl Rng, device: &DeviceSpec, n: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, device.n_qubits(), n).into_vec()
}

/// Physical position of every logical qubit before routing, keyed by the
/// qubit reference used in `original`.
fn input_positions(original: &Circuit, compiled: &CompiledCircuit) -> BTreeMap<Qubit, usize> {
    original
        .qubit_set()
        .into_iter()
        .map(|q| {
            let p = match &q {
                Qubit::Physical(p) => *p,
                Qubit::Abstract(name) => compiled.initial_map[name],
            };
            (q, p)
        })
        .collect()
}

/// Fidelity `|⟨P·U·ψ | C·ψ'⟩|²` between the original circuit and its
/// compiled form, starting from an entangled, non-symmetric input state
/// `ψ` laid out on each logical qubit's initial physical position. `P`
/// moves every logical qubit to where `final_permutation` says it ends.
pub fn compiled_fidelity(original: &Circuit, compiled: &CompiledCircuit) -> f64 {
    let positions = input_positions(original, compiled);
    let logical: Vec<&Qubit> = positions.keys().collect();
    let index: BTreeMap<&Qubit, usize> = logical.iter().enumerate().map(|(i, q)| (*q, i)).collect();

    // Reference: logical qubit i on index i.
    let mut reference = prep(logical.len(), |i| i);
    for instr in original.without_measurements().instructions() {
        let qubits = instr.qubits.iter().map(|q| Qubit::Physical(index[q])).collect();
        reference.push(Instruction { qubits, ..instr.clone() });
    }
    let reference = run_statevector(&Circuit::new(reference).unwrap()).unwrap();

    let inputs: Vec<usize> = logical.iter().map(|q| positions[*q]).collect();
    let mut physical = prep(logical.len(), |i| inputs[i]);
    physical.extend(compiled.circuit.without_measurements().instructions().iter().cloned());
    let physical = run_statevector(&Circuit::new(physical).unwrap()).unwrap();

    let outputs: Vec<usize> = inputs.iter().map(|&p| compiled.final_permutation[p]).collect();
    let amps = physical.amplitudes();
    let mut overlap = Complex64::new(0.0, 0.0);
    for (b, a) in reference.amplitudes().iter().enumerate() {
        let target = (0..logical.len()).fold(0, |acc, i| acc | (((b >> i) & 1) << outputs[i]));
        match amps.get(target) {
            Some(c) => overlap += a.conj() * c,
            None if a.norm_sqr() == 0.0 => {}
            None => return 0.0,
        }
    }
    overlap.norm_sqr()
}

/// Every measurement lands on the final position of the qubit it measured.
pub fn measurements_follow_permutation(original: &Circuit, compiled: &CompiledCircuit) -> bool {
    let positions = input_positions(original, compiled);
    let expected: BTreeMap<usize, usize> = original
        .measurements()
        .into_iter()
        .map(|(q, c)| (c, compiled.final_permutation[positions[&q]]))
        .collect();
    let actual: BTreeMap<usize, usize> = compiled
        .circuit
        .measurements()
        .into_iter()
        .map(|(q, c)| (c, q.physical_index().unwrap()))
        .collect();
    expected == actual
}

/// Entangling state preparation on `n` qubits placed at `at(i)`.
fn prep(n: usize, at: impl Fn(usize) -> usize) -> Vec<Instruction> {
    let mut out = Vec::new();
    for i in 0..n {
        out.push(Instruction::rotation(GateKind::RY, 0.3 + 0.7 * i as f64, at(i)));
        out.push(Instruction::rotation(GateKind::RZ, 0.2 + 1.1 * i as f64, at(i)));
    }
    for i in 1..n {
        out.push(Instruction::two(GateKind::CNOT, at(i - 1), at(i)));
        out.push(Instruction::rotation(GateKind::RX, 0.5 * i as f64, at(i)));
    }
    out
}

/// Every two-qubit gate sits on an edge and every gate is native.
pub fn device_legal(compiled: &CompiledCircuit, device: &DeviceSpec) -> bool {
    compiled.circuit.instructions().iter().all(|i| {
        let on_edge = match i.qubits.as_slice() {
            [Qubit::Physical(a), Qubit::Physical(b)] => device.has_edge(*a, *b),
            [Qubit::Physical(_)] => true,
            _ => false,
        };
        on_edge && device.is_native(i)
    })
}
