"""Gate/circuit IR, the probe circuit layout, and its step plan."""

import pytest

from noisefp.circuit import (GATES_PER_BLOCK, MEASURED_QUBITS, PROBE_QUBITS,
                             Circuit, Gate, GateKind, StepPlan, build_testbed,
                             cnot, hadamard, pauli_x, prefix, step_plan, toffoli)
from noisefp.errors import DataFormatError, InvalidArgumentError


def test_gate_constructors():
    assert hadamard(2) == Gate(GateKind.H, (2,))
    assert pauli_x(0).qubits == (0,)
    g = cnot(1, 3)
    assert g.controls == (1,) and g.target == 3
    t = toffoli(0, 1, 2)
    assert t.controls == (0, 1) and t.target == 2


@pytest.mark.parametrize("bad", [
    lambda: Gate(GateKind.H, (0, 1)),
    lambda: Gate(GateKind.CNOT, (2,)),
    lambda: Gate(GateKind.CNOT, (1, 1)),
    lambda: Gate(GateKind.TOFFOLI, (0, 1, -1)),
    lambda: Gate("h", (0,)),
])
def test_gate_validation(bad):
    with pytest.raises(InvalidArgumentError):
        bad()


def test_testbed_shape():
    circuit = build_testbed(3)
    assert circuit.n_qubits == PROBE_QUBITS == 4
    assert circuit.n_gates == 3 * GATES_PER_BLOCK == 21
    assert circuit.measured_qubits == MEASURED_QUBITS == (2, 3)
    kinds = [g.kind for g in circuit.gates[:7]]
    assert kinds == [GateKind.H, GateKind.H, GateKind.CNOT, GateKind.CNOT,
                     GateKind.X, GateKind.X, GateKind.TOFFOLI]
    # blocks are identical copies
    assert circuit.gates[:7] == circuit.gates[7:14] == circuit.gates[14:21]


def test_step_plan_cut_points():
    assert step_plan(1).cut_points == (3, 5, 7)
    assert step_plan(3).cut_points == (3, 5, 7, 10, 12, 14, 17, 19, 21)
    assert step_plan(3).n_steps == 9


@pytest.mark.parametrize("repetitions", [0, -1])
def test_testbed_rejects_bad_repetitions(repetitions):
    with pytest.raises(InvalidArgumentError):
        build_testbed(repetitions)
    with pytest.raises(InvalidArgumentError):
        step_plan(repetitions)


def test_prefix():
    circuit = build_testbed(2)
    head = prefix(circuit, 5)
    assert head.n_gates == 5
    assert head.gates == circuit.gates[:5]
    assert head.measured_qubits == circuit.measured_qubits
    with pytest.raises(InvalidArgumentError):
        prefix(circuit, 0)
    with pytest.raises(InvalidArgumentError):
        prefix(circuit, circuit.n_gates + 1)


def test_step_plan_validation():
    with pytest.raises(InvalidArgumentError):
        StepPlan(())
    with pytest.raises(InvalidArgumentError):
        StepPlan((3, 3))
    with pytest.raises(InvalidArgumentError):
        StepPlan((0, 2))


def test_circuit_validation():
    with pytest.raises(InvalidArgumentError):
        Circuit(2, (toffoli(0, 1, 2),), (0,))
    with pytest.raises(InvalidArgumentError):
        Circuit(2, (hadamard(0),), ())
    with pytest.raises(InvalidArgumentError):
        Circuit(2, (hadamard(0),), (0, 0))
    with pytest.raises(InvalidArgumentError):
        Circuit(2, (hadamard(0),), (2,))


def test_json_round_trip():
    circuit = build_testbed(2)
    again = Circuit.from_json(circuit.to_json())
    assert again == circuit


@pytest.mark.parametrize("text", [
    "not json",
    '{"n_qubits": 4}',
    '{"n_qubits": 4, "gates": [{"kind": "warp", "qubits": [0]}], "measured": [2]}',
])
def test_json_rejects_malformed(text):
    with pytest.raises(DataFormatError):
        Circuit.from_json(text)


def test_diagram_marks_gates_and_measurement():
    lines = build_testbed(1).diagram().splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("q0: H")
    assert lines[2].endswith("  M") and lines[3].endswith("  M")
    # toffoli column: controls on q0/q1, target plus on q2
    assert lines[0].rstrip()[-1] == "*"
    assert lines[1].rstrip()[-1] == "*"
    assert lines[2].rstrip("M ").rstrip()[-1] == "+"
