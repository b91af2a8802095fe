use super::{CompileError, DeviceSpec};
use crate::circuit::{Circuit, GateKind, Instruction, Qubit};

/// A routed circuit and where every logical qubit ended up.
#[derive(Debug, Clone, PartialEq)]
pub struct Routed {
    pub circuit: Circuit,
    /// `final_permutation[l]` is the physical qubit holding logical qubit `l`
    /// at the end of the circuit. Covers every device qubit.
    pub final_permutation: Vec<usize>,
    pub swaps: usize,
}

/// Insert SWAPs so every two-qubit gate acts on a coupled pair.
///
/// When a gate's operands are not adjacent, the second operand is walked
/// along a BFS shortest path towards the first until they touch. The layout
/// is carried forward (SWAPs are never undone) and measurements follow
/// their logical qubit.
pub fn route(circuit: &Circuit, device: &DeviceSpec) -> Result<Routed, CompileError> {
    circuit.require_physical()?;
    let n = device.n_qubits();
    if let Some(q) = circuit
        .qubit_set()
        .iter()
        .filter_map(Qubit::physical_index)
        .find(|&q| q >= n)
    {
        return Err(CompileError::QubitOffDevice { qubit: q, n_qubits: n });
    }

    let mut loc: Vec<usize> = (0..n).collect();
    let mut at: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(circuit.len());
    let mut swaps = 0;
    let phys = |q: &Qubit| q.physical_index().expect("checked physical");

    for instr in circuit.instructions() {
        if instr.qubits.len() == 2 {
            let (a, b) = (phys(&instr.qubits[0]), phys(&instr.qubits[1]));
            if !device.has_edge(loc[a], loc[b]) {
                let path = device.shortest_path(loc[b], loc[a]);
                for hop in path.windows(2).take(path.len() - 2) {
                    let (p, q) = (hop[0], hop[1]);
                    out.push(Instruction::two(GateKind::SWAP, p.min(q), p.max(q)));
                    swaps += 1;
                    let (lp, lq) = (at[p], at[q]);
                    at.swap(p, q);
                    loc[lp] = q;
                    loc[lq] = p;
                }
            }
        }
        out.push(Instruction {
            qubits: instr.qubits.iter().map(|q| Qubit::Physical(loc[phys(q)])).collect(),
            ..instr.clone()
        });
    }
    Ok(Routed {
        circuit: Circuit::new(out)?,
        final_permutation: loc,
        swaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_program;

    #[test]
    fn distant_cz_gets_one_swap() {
        let d = DeviceSpec::agave8();
        let r = route(&parse_program("CZ 0 2").unwrap(), &d).unwrap();
        assert_eq!(r.circuit, parse_program("SWAP 1 2\nCZ 0 1").unwrap());
        assert_eq!(r.final_permutation, vec![0, 2, 1, 3, 4, 5, 6, 7]);
        assert_eq!(r.swaps, 1);
    }

    #[test]
    fn adjacent_and_single_qubit_circuits_are_unchanged() {
        let d = DeviceSpec::agave8();
        for src in ["CZ 0 1", "H 0\nRX(0.3) 5\nMEASURE 5 -> 0", "CNOT 7 0"] {
            let c = parse_program(src).unwrap();
            let r = route(&c, &d).unwrap();
            assert_eq!(r.circuit, c);
            assert_eq!(r.final_permutation, (0..8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn measurements_follow_their_qubit() {
        let d = DeviceSpec::agave8();
        let c = parse_program("CNOT 0 3\nMEASURE 3 -> 0\nMEASURE 0 -> 1").unwrap();
        let r = route(&c, &d).unwrap();
        let text = crate::circuit::print_program(&r.circuit);
        assert_eq!(text, "SWAP 2 3\nSWAP 1 2\nCNOT 0 1\nMEASURE 1 -> 0\nMEASURE 0 -> 1\n");
        assert_eq!(r.final_permutation[3], 1);
    }

    #[test]
    fn rejects_off_device_and_abstract() {
        let d = DeviceSpec::agave8();
        assert_eq!(
            route(&parse_program("X 8").unwrap(), &d).unwrap_err(),
            CompileError::QubitOffDevice { qubit: 8, n_qubits: 8 }
        );
        assert!(route(&parse_program("X %a").unwrap(), &d).is_err());
    }
}
