//! Abstract circuit → device-executable circuit.
//!
//! The pipeline selects a path of physical qubits, assigns abstract qubits
//! to it so interacting pairs sit close together, inserts routing SWAPs,
//! and only then lowers every gate to the device's native set. Symbolic angles
//! survive compilation, so a compiled circuit can be re-bound on every
//! optimizer step without recompiling.

mod decompose;
mod device;
mod layout;
mod route;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitError, GateKind, Qubit};

pub use decompose::decompose_gate;
pub use device::{DeviceError, DeviceFile, DeviceSpec, NativeGate};
pub use layout::{assign_to_path, select_qubits};
pub use route::{route, Routed};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("circuit needs {required} qubits but the device has {available}")]
    NotEnoughQubits { required: usize, available: usize },
    #[error("no connected path of {0} qubits on the device")]
    NoPath(usize),
    #[error("qubit {qubit} is not on the device ({n_qubits} qubits)")]
    QubitOffDevice { qubit: usize, n_qubits: usize },
    #[error("compiled {kind} is not in the device's native set")]
    NotNative { kind: GateKind },
}

/// Output of [`compile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledCircuit {
    pub circuit: Circuit,
    /// Abstract name → physical index chosen before routing; empty when the
    /// input was already physical.
    pub initial_map: BTreeMap<String, usize>,
    /// `final_permutation[p]`: where the qubit assigned to physical `p`
    /// sits once all routing SWAPs have run.
    pub final_permutation: Vec<usize>,
    pub depth: usize,
    pub gate_counts: BTreeMap<GateKind, usize>,
    pub swaps: usize,
}

impl CompiledCircuit {
    /// Bind symbols on the compiled circuit. Structure, depth and counts
    /// are unchanged.
    pub fn bind(&self, binding: &BTreeMap<String, f64>) -> Result<CompiledCircuit, CircuitError> {
        Ok(CompiledCircuit {
            circuit: self.circuit.bind_parameters(binding)?,
            ..self.clone()
        })
    }
}

/// Compile `circuit` for `device`.
pub fn compile(circuit: &Circuit, device: &DeviceSpec) -> Result<CompiledCircuit, CompileError> {
    let names = circuit.abstract_qubits();
    let (physical, initial_map) = if names.is_empty() {
        (circuit.clone(), BTreeMap::new())
    } else {
        let path = select_qubits(device, names.len())?;
        let pairs: Vec<(usize, usize)> = circuit
            .instructions()
            .iter()
            .filter_map(|i| match i.qubits.as_slice() {
                [Qubit::Abstract(a), Qubit::Abstract(b)] => Some((
                    names.iter().position(|n| n == a)?,
                    names.iter().position(|n| n == b)?,
                )),
                _ => None,
            })
            .collect();
        let chosen = assign_to_path(device, &path, &pairs);
        let map: BTreeMap<String, usize> = names.into_iter().zip(chosen).collect();
        (circuit.assign_qubits(&map)?, map)
    };
    let routed = route(&physical, device)?;
    let mut lowered = Vec::with_capacity(routed.circuit.len() * 3);
    for instr in routed.circuit.instructions() {
        lowered.extend(decompose_gate(instr)?);
    }
    for instr in &lowered {
        if !device.is_native(instr) {
            return Err(CompileError::NotNative { kind: instr.kind });
        }
        if let [Qubit::Physical(a), Qubit::Physical(b)] = instr.qubits.as_slice() {
            debug_assert!(device.has_edge(*a, *b), "routing left ({a}, {b}) off-graph");
        }
    }
    let circuit = Circuit::new(lowered)?;
    Ok(CompiledCircuit {
        depth: circuit.depth(),
        gate_counts: circuit.gate_counts(),
        circuit,
        initial_map,
        final_permutation: routed.final_permutation,
        swaps: routed.swaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_program, unitary_of_width};

    #[test]
    fn empty_circuit_compiles_to_empty() {
        let c = compile(&Circuit::empty(), &DeviceSpec::agave8()).unwrap();
        assert!(c.circuit.is_empty());
        assert_eq!(c.depth, 0);
        assert_eq!(c.swaps, 0);
    }

    #[test]
    fn abstract_qubits_follow_selection_order() {
        let c = parse_program("H %b\nCNOT %b %a\nMEASURE %a -> 0").unwrap();
        let out = compile(&c, &DeviceSpec::agave8()).unwrap();
        assert_eq!(out.initial_map, [("b".to_string(), 0), ("a".to_string(), 1)].into());
        assert_eq!(out.swaps, 0);
        assert!(out.circuit.is_physical());
    }

    #[test]
    fn interacting_qubits_are_placed_adjacent() {
        let c = parse_program("CNOT %a %b\nCNOT %a %c\nMEASURE %c -> 0").unwrap();
        let out = compile(&c, &DeviceSpec::agave8()).unwrap();
        assert_eq!(out.swaps, 0);
        assert_eq!(out.initial_map["a"], 1);
    }

    #[test]
    fn compiled_unitary_matches_under_permutation() {
        let src = "H 0\nCNOT 0 2\nRY(0.4) 2\nSWAP 0 2\nRX(1.1) 1\nCZ 1 3";
        let c = parse_program(src).unwrap();
        let out = compile(&c, &DeviceSpec::agave8()).unwrap();
        let width = 4.max(out.circuit.physical_width());
        let orig = unitary_of_width(&c, width).unwrap();
        let comp = unitary_of_width(&out.circuit, width).unwrap();
        // permute the original's output basis onto physical positions
        let dim = 1 << width;
        let perm = |basis: usize| -> usize {
            (0..width).fold(0, |acc, l| acc | (((basis >> l) & 1) << out.final_permutation[l]))
        };
        let rows: Vec<Vec<_>> = (0..dim)
            .map(|r| (0..dim).map(|col| orig.get(r, col)).collect())
            .collect();
        let mut permuted = vec![vec![num_complex::Complex64::new(0.0, 0.0); dim]; dim];
        for (r, row) in rows.into_iter().enumerate() {
            permuted[perm(r)] = row;
        }
        let permuted = crate::circuit::Matrix::from_rows(permuted);
        assert!(permuted.equal_up_to_phase(&comp, 1e-9));
    }
}
