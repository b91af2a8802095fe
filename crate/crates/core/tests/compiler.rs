mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{build, compiled_fidelity, device_legal, measurements_follow_permutation, GateSpec, Slots, GATE_KINDS};
use hqc::circuit::{parse_program, print_program, Circuit, Param};
use hqc::compiler::{compile, DeviceSpec};
use proptest::prelude::*;

fn gates(n: usize, max_len: usize) -> impl Strategy<Value = Vec<GateSpec>> {
    // with one qubit, two-qubit kinds become H and `b` is unused
    let gate = (0..GATE_KINDS.len(), 0..n, 1..n.max(2), -7.0..7.0f64).prop_map(move |(k, a, off, angle)| {
        let kind = match GATE_KINDS[k] {
            k if n == 1 && k.num_qubits() == 2 => hqc::circuit::GateKind::H,
            k => k,
        };
        GateSpec { kind, a, b: (a + off) % n, angle }
    });
    prop::collection::vec(gate, 1..=max_len)
}

fn abstract_circuit() -> impl Strategy<Value = Circuit> {
    (1..=4usize).prop_flat_map(|n| gates(n, 20)).prop_map(|g| build(&g, &Slots::Abstract))
}

fn physical_circuit() -> impl Strategy<Value = Circuit> {
    (2..=4usize)
        .prop_flat_map(|n| (gates(n, 20), prop::sample::subsequence((0..8).collect::<Vec<_>>(), n).prop_shuffle()))
        .prop_map(|(g, slots)| build(&g, &Slots::Physical(slots)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn abstract_circuits_compile_faithfully(c in abstract_circuit()) {
        let device = DeviceSpec::agave8();
        let out = compile(&c, &device).unwrap();
        prop_assert!(device_legal(&out, &device));
        prop_assert!(compiled_fidelity(&c, &out) > 1.0 - 1e-9);
        prop_assert!(measurements_follow_permutation(&c, &out));
    }

    #[test]
    fn physical_circuits_compile_faithfully(c in physical_circuit()) {
        let device = DeviceSpec::agave8();
        let out = compile(&c, &device).unwrap();
        prop_assert!(device_legal(&out, &device));
        prop_assert!(compiled_fidelity(&c, &out) > 1.0 - 1e-9);
        prop_assert!(measurements_follow_permutation(&c, &out));
    }

    #[test]
    fn final_permutation_is_a_bijection(c in abstract_circuit()) {
        let out = compile(&c, &DeviceSpec::agave8()).unwrap();
        let image: BTreeSet<usize> = out.final_permutation.iter().copied().collect();
        prop_assert_eq!(image.len(), out.final_permutation.len());
        prop_assert!(image.iter().all(|&p| p < out.final_permutation.len()));
    }

    #[test]
    fn compiling_then_binding_matches_binding_then_compiling(a in -7.0..7.0f64, b in -7.0..7.0f64) {
        let src = "RX(%a) %x\nRY(%b) %y\nCNOT %x %y\nRY(-%a) %y\nMEASURE %x -> 0\nMEASURE %y -> 1";
        let symbolic = parse_program(src).unwrap();
        let binding: BTreeMap<String, f64> = [("a".into(), a), ("b".into(), b)].into();
        let device = DeviceSpec::agave8();
        let late = compile(&symbolic, &device).unwrap().bind(&binding).unwrap();
        let bound = symbolic.bind_parameters(&binding).unwrap();
        let early = compile(&bound, &device).unwrap();
        prop_assert_eq!(late.depth, early.depth);
        prop_assert_eq!(&late.initial_map, &early.initial_map);
        prop_assert!(compiled_fidelity(&bound, &late) > 1.0 - 1e-9);
    }

    #[test]
    fn print_parse_round_trips(c in abstract_circuit()) {
        let text = print_program(&c);
        let back = parse_program(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(print_program(&back), text);
    }
}

#[test]
fn far_apart_physical_qubits_are_routed() {
    let c = parse_program("H 0\nCNOT 0 4\nMEASURE 0 -> 0\nMEASURE 4 -> 1").unwrap();
    let device = DeviceSpec::agave8();
    let out = compile(&c, &device).unwrap();
    assert!(out.swaps > 0);
    assert!(device_legal(&out, &device));
    assert!(compiled_fidelity(&c, &out) > 1.0 - 1e-9);
    assert!(measurements_follow_permutation(&c, &out));
}

#[test]
fn symbolic_angles_survive_compilation() {
    let c = parse_program("RY(%t) %a\nRX(-%t) %a\nMEASURE %a -> 0").unwrap();
    let out = compile(&c, &DeviceSpec::agave8()).unwrap();
    let symbols: Vec<&Param> = out
        .circuit
        .instructions()
        .iter()
        .flat_map(|i| &i.params)
        .filter(|p| p.symbol_name().is_some())
        .collect();
    assert_eq!(symbols.len(), 2);
}

#[test]
fn oracle_rejects_broken_compilations() {
    let c = parse_program("H 0\nCNOT 0 4\nRY(0.7) 4\nMEASURE 0 -> 0\nMEASURE 4 -> 1").unwrap();
    let good = compile(&c, &DeviceSpec::agave8()).unwrap();

    let mut dropped = good.clone();
    let mut instrs = good.circuit.instructions().to_vec();
    // the last CZ is the routed CNOT; earlier ones may be SWAP halves acting on |0⟩
    let cz = instrs.iter().rposition(|i| i.qubits.len() == 2).unwrap();
    instrs.remove(cz);
    dropped.circuit = Circuit::new(instrs).unwrap();
    assert!(compiled_fidelity(&c, &dropped) < 0.99);

    let mut misplaced = good.clone();
    misplaced.final_permutation = (0..8).collect();
    assert!(compiled_fidelity(&c, &misplaced) < 0.99);
}
