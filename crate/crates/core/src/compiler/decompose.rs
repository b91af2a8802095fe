use std::f64::consts::{FRAC_PI_2, PI};

use super::device::is_half_pi_multiple;
use super::CompileError;
use crate::circuit::{GateKind, Instruction, Param, Qubit};

fn rz(angle: impl Into<Param>, q: &Qubit) -> Instruction {
    Instruction::rotation(GateKind::RZ, angle, q.clone())
}

fn rx(angle: f64, q: &Qubit) -> Instruction {
    Instruction::rotation(GateKind::RX, angle, q.clone())
}

fn hadamard(q: &Qubit) -> [Instruction; 3] {
    [rz(FRAC_PI_2, q), rx(FRAC_PI_2, q), rz(FRAC_PI_2, q)]
}

fn cnot(control: &Qubit, target: &Qubit) -> Vec<Instruction> {
    let mut out = Vec::with_capacity(7);
    out.extend(hadamard(target));
    out.push(Instruction::two(GateKind::CZ, control.clone(), target.clone()));
    out.extend(hadamard(target));
    out
}

/// Rewrite one instruction over {RZ(any), RX(k·π/2), CZ, MEASURE}.
///
/// The returned sequence is in time order and matches the input unitary up
/// to a global phase:
///
/// | gate      | native sequence                                  |
/// |-----------|--------------------------------------------------|
/// | I         | (nothing)                                        |
/// | X         | RX(π)                                            |
/// | Y         | RX(π), RZ(π)                                     |
/// | Z         | RZ(π)                                            |
/// | H         | RZ(π/2), RX(π/2), RZ(π/2)                        |
/// | RX(θ)     | itself if θ is a constant multiple of π/2, else  |
/// |           | RZ(π/2), RX(π/2), RZ(θ), RX(−π/2), RZ(−π/2)      |
/// | RY(θ)     | RX(π/2), RZ(θ), RX(−π/2)                         |
/// | CNOT(c,t) | H(t), CZ(c,t), H(t)                              |
/// | SWAP(a,b) | CNOT(a,b), CNOT(b,a), CNOT(a,b)                  |
///
/// Symbolic angles only ever land in RZ, so a symbolic circuit compiles to
/// the same structure regardless of the values bound later.
pub fn decompose_gate(instr: &Instruction) -> Result<Vec<Instruction>, CompileError> {
    let q = &instr.qubits;
    let out = match instr.kind {
        GateKind::MEASURE | GateKind::RZ | GateKind::CZ => vec![instr.clone()],
        GateKind::I => vec![],
        GateKind::X => vec![rx(PI, &q[0])],
        GateKind::Y => vec![rx(PI, &q[0]), rz(PI, &q[0])],
        GateKind::Z => vec![rz(PI, &q[0])],
        GateKind::H => hadamard(&q[0]).to_vec(),
        GateKind::RX => match &instr.params[0] {
            Param::Const(v) if is_half_pi_multiple(*v) => vec![instr.clone()],
            theta => vec![
                rz(FRAC_PI_2, &q[0]),
                rx(FRAC_PI_2, &q[0]),
                rz(theta.clone(), &q[0]),
                rx(-FRAC_PI_2, &q[0]),
                rz(-FRAC_PI_2, &q[0]),
            ],
        },
        GateKind::RY => vec![
            rx(FRAC_PI_2, &q[0]),
            rz(instr.params[0].clone(), &q[0]),
            rx(-FRAC_PI_2, &q[0]),
        ],
        GateKind::CNOT => cnot(&q[0], &q[1]),
        GateKind::SWAP => {
            let mut out = cnot(&q[0], &q[1]);
            out.extend(cnot(&q[1], &q[0]));
            out.extend(cnot(&q[0], &q[1]));
            out
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{unitary_of, Circuit};
    use crate::compiler::DeviceSpec;

    fn check(instr: Instruction) -> Vec<Instruction> {
        let device = DeviceSpec::agave8();
        let natives = decompose_gate(&instr).unwrap();
        assert!(natives.iter().all(|i| device.is_native(i)), "{instr:?} -> {natives:?}");
        let width = instr.qubits.iter().filter_map(|q| q.physical_index()).max().unwrap() + 1;
        let original = crate::circuit::unitary_of_width(&Circuit::new(vec![instr.clone()]).unwrap(), width).unwrap();
        let lowered =
            crate::circuit::unitary_of_width(&Circuit::new(natives.clone()).unwrap(), width).unwrap();
        assert!(
            original.equal_up_to_phase(&lowered, 1e-12),
            "{instr:?} not equivalent to {natives:?}"
        );
        natives
    }

    #[test]
    fn every_kind_is_equivalent_up_to_phase() {
        use GateKind::*;
        for kind in [I, X, Y, Z, H] {
            check(Instruction::one(kind, 0));
        }
        for theta in [0.0, 0.7, -1.3, FRAC_PI_2, PI, 2.9, -3.0 * FRAC_PI_2] {
            check(Instruction::rotation(RX, theta, 0));
            check(Instruction::rotation(RY, theta, 0));
            check(Instruction::rotation(RZ, theta, 0));
        }
        check(Instruction::two(CNOT, 0, 1));
        check(Instruction::two(CNOT, 1, 0));
        check(Instruction::two(CZ, 0, 1));
    }

    #[test]
    fn rz_is_left_alone() {
        let i = Instruction::rotation(GateKind::RZ, 0.7, 0);
        assert_eq!(check(i.clone()), vec![i]);
    }

    #[test]
    fn hadamard_takes_three_gates() {
        assert_eq!(check(Instruction::one(GateKind::H, 0)).len(), 3);
    }

    #[test]
    fn swap_expands_to_21_gates() {
        let natives = check(Instruction::two(GateKind::SWAP, 0, 1));
        assert_eq!(natives.len(), 21);
        assert_eq!(natives.iter().filter(|i| i.kind == GateKind::CZ).count(), 3);
    }

    #[test]
    fn symbolic_angles_stay_in_rz() {
        for kind in [GateKind::RX, GateKind::RY] {
            let i = Instruction::rotation(kind, -Param::symbol("t"), 0);
            let natives = decompose_gate(&i).unwrap();
            let symbolic: Vec<_> = natives.iter().filter(|n| n.params.iter().any(|p| p.symbol_name().is_some())).collect();
            assert_eq!(symbolic.len(), 1);
            assert_eq!(symbolic[0].kind, GateKind::RZ);
            // bound afterwards, still equivalent
            let bound = Circuit::new(natives).unwrap().bind_parameters(&[("t".to_string(), 0.4)].into()).unwrap();
            let direct = Circuit::new(vec![Instruction::rotation(kind, -0.4, 0)]).unwrap();
            assert!(unitary_of(&bound).unwrap().equal_up_to_phase(&unitary_of(&direct).unwrap(), 1e-12));
        }
    }
}
