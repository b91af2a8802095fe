"""Smoke test for the hqc Python extension.

Build and install first:

    pip install maturin
    maturin build --release -m crates/py/Cargo.toml
    pip install --force-reinstall target/wheels/hqc-*.whl
    python python/smoke_test.py
"""

import json
import math

import hqc


def check_compile():
    circuit = hqc.Circuit("H %a\nCNOT %a %b\nMEASURE %a -> 0\nMEASURE %b -> 1\n")
    assert circuit.abstract_qubits() == ["a", "b"]
    device = hqc.Device.resolve("agave8")
    assert device.n_qubits == 8 and len(device.edges) == 8
    compiled = hqc.compile(circuit, device)
    assert compiled.circuit.is_physical
    assert set(compiled.gate_counts) <= {"RZ", "RX", "CZ", "MEASURE"}
    return compiled


def check_sampling(compiled):
    result = hqc.sample_shots(compiled.circuit, 1000, seed=5)
    counts = result.counts()
    assert set(counts) <= {"00", "11"}, counts
    assert abs(counts.get("00", 0) / 1000 - 0.5) < 0.06
    again = hqc.sample_shots(compiled.circuit, 1000, seed=5)
    assert again.bitstrings == result.bitstrings

    probs = hqc.probabilities(hqc.Circuit("X 0\nH 1\n"))
    assert math.isclose(probs[1], 0.5) and math.isclose(probs[3], 0.5)


def check_symbolic():
    circuit = hqc.Circuit("RY(%t) 0\nMEASURE 0 -> 0\n")
    assert circuit.free_symbols() == ["t"]
    compiled = hqc.compile(circuit, hqc.Device.resolve("agave8"))
    bound = compiled.bind({"t": math.pi})
    assert bound.depth == compiled.depth
    assert math.isclose(hqc.probabilities(bound.circuit)[1], 1.0)
    try:
        hqc.Circuit("FROB 0\n")
    except ValueError:
        pass
    else:
        raise AssertionError("bad program accepted")


def check_service(compiled):
    service = hqc.Service()
    try:
        program = compiled.circuit.to_text()
        noise = hqc.NoiseModel(p1=0.01, p2=0.02)
        remote = hqc.execute_remote(service.url, program, 300, seed=9, noise=noise)
        local = hqc.sample_shots(compiled.circuit, 300, noise=noise, seed=9)
        assert remote.bitstrings == local.bitstrings
    finally:
        service.shutdown()


def check_experiment():
    assert math.isclose(hqc.p1_analytic(0.0, 0.0, math.pi / 2), 0.5)
    config = {
        "command": "classify_grid",
        "exec": None,
        "w0": math.pi / 2,
        "w1": 0.0,
        "points": 5,
    }
    result = hqc.run_experiment(json.dumps(config))
    payload = json.loads(result)["payload"]
    assert len(payload["p1"]) == 5 and all(len(row) == 5 for row in payload["p1"])
    assert hqc.replay(result)


def main():
    compiled = check_compile()
    check_sampling(compiled)
    check_symbolic()
    check_service(compiled)
    check_experiment()
    print("python smoke test passed")


if __name__ == "__main__":
    main()
