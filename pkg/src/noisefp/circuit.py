"""Gate-level circuit IR, the 4-qubit probe circuit, and its measurement plan.

The probe circuit is a fixed 7-gate block repeated a configurable number of
times.  Within each block three cut points define where mid-circuit
measurement statistics are collected, so ``repetitions`` blocks yield
``3 * repetitions`` measurement steps.  Qubits 2 and 3 are the measured pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .errors import DataFormatError, InvalidArgumentError


class GateKind(Enum):
    H = "h"
    X = "x"
    CNOT = "cnot"
    TOFFOLI = "toffoli"


_N_OPERANDS = {GateKind.H: 1, GateKind.X: 1, GateKind.CNOT: 2, GateKind.TOFFOLI: 3}


@dataclass(frozen=True)
class Gate:
    """A single gate application; ``qubits`` lists controls first, target last."""

    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.kind, GateKind):
            raise InvalidArgumentError(f"unknown gate kind: {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        expected = _N_OPERANDS[self.kind]
        if len(self.qubits) != expected:
            raise InvalidArgumentError(
                f"{self.kind.value} takes {expected} operand(s), got {len(self.qubits)}"
            )
        if any(q < 0 for q in self.qubits):
            raise InvalidArgumentError(f"negative qubit index in {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidArgumentError(f"gate operands must be distinct, got {self.qubits}")

    @property
    def target(self) -> int:
        return self.qubits[-1]

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[:-1]


def hadamard(qubit: int) -> Gate:
    return Gate(GateKind.H, (qubit,))


def pauli_x(qubit: int) -> Gate:
    return Gate(GateKind.X, (qubit,))


def cnot(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (control, target))


def toffoli(control_a: int, control_b: int, target: int) -> Gate:
    return Gate(GateKind.TOFFOLI, (control_a, control_b, target))


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list on ``n_qubits`` qubits plus the measured subset.

    Measured qubits are listed in readout order: the first measured qubit
    supplies the leftmost bit of every outcome label.
    """

    n_qubits: int
    gates: tuple[Gate, ...]
    measured_qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measured_qubits", tuple(int(q) for q in self.measured_qubits))
        if self.n_qubits < 1:
            raise InvalidArgumentError(f"n_qubits must be >= 1, got {self.n_qubits}")
        for gate in self.gates:
            if max(gate.qubits) >= self.n_qubits:
                raise InvalidArgumentError(
                    f"gate {gate.kind.value}{gate.qubits} exceeds n_qubits={self.n_qubits}"
                )
        if not self.measured_qubits:
            raise InvalidArgumentError("at least one measured qubit is required")
        if len(set(self.measured_qubits)) != len(self.measured_qubits):
            raise InvalidArgumentError("measured qubits must be distinct")
        if any(q < 0 or q >= self.n_qubits for q in self.measured_qubits):
            raise InvalidArgumentError(
                f"measured qubits {self.measured_qubits} out of range for n_qubits={self.n_qubits}"
            )

    @property
    def n_gates(self) -> int:
        return len(self.gates)

    def to_json_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "gates": [{"kind": g.kind.value, "qubits": list(g.qubits)} for g in self.gates],
            "measured": list(self.measured_qubits),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Circuit":
        try:
            gates = tuple(
                Gate(GateKind(g["kind"]), tuple(g["qubits"])) for g in obj["gates"]
            )
            return cls(int(obj["n_qubits"]), gates, tuple(obj["measured"]))
        except InvalidArgumentError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"malformed circuit object: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"circuit JSON does not parse: {exc}") from exc
        return cls.from_json_dict(obj)

    def diagram(self) -> str:
        """ASCII rendering, one column per gate. ``*`` control, ``+`` X-type target."""
        cells = [["-"] * self.n_gates for _ in range(self.n_qubits)]
        for col, gate in enumerate(self.gates):
            if gate.kind is GateKind.H:
                cells[gate.target][col] = "H"
            elif gate.kind is GateKind.X:
                cells[gate.target][col] = "X"
            else:
                for c in gate.controls:
                    cells[c][col] = "*"
                cells[gate.target][col] = "+"
                lo, hi = min(gate.qubits), max(gate.qubits)
                for q in range(lo + 1, hi):
                    if cells[q][col] == "-":
                        cells[q][col] = "|"
        lines = []
        for q in range(self.n_qubits):
            mark = "  M" if q in self.measured_qubits else ""
            lines.append(f"q{q}: " + "-".join(cells[q]) + mark)
        return "\n".join(lines)


@dataclass(frozen=True)
class StepPlan:
    """Gate-count cut points, one per measurement step, strictly increasing."""

    cut_points: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cut_points", tuple(int(c) for c in self.cut_points))
        if not self.cut_points:
            raise InvalidArgumentError("a step plan needs at least one cut point")
        if self.cut_points[0] < 1 or any(
            b <= a for a, b in zip(self.cut_points, self.cut_points[1:])
        ):
            raise InvalidArgumentError(
                f"cut points must be positive and strictly increasing, got {self.cut_points}"
            )

    @property
    def n_steps(self) -> int:
        return len(self.cut_points)


# One block of the probe circuit. Entangle the measured pair (2, 3) with the
# driven pair (0, 1), then disturb the drive so the next block starts from a
# shifted basis. Cut points fall after the entangling layer, after the bit
# flips, and after the Toffoli.
_BLOCK_GATES = (
    hadamard(0),
    hadamard(1),
    cnot(0, 2),
    cnot(1, 3),
    pauli_x(0),
    pauli_x(1),
    toffoli(0, 1, 2),
)
GATES_PER_BLOCK = len(_BLOCK_GATES)
_BLOCK_CUTS = (3, 5, 7)
STEPS_PER_BLOCK = len(_BLOCK_CUTS)
PROBE_QUBITS = 4
MEASURED_QUBITS = (2, 3)


def build_testbed(repetitions: int) -> Circuit:
    """The probe circuit: ``repetitions`` copies of the 7-gate block."""
    if repetitions < 1:
        raise InvalidArgumentError(f"repetitions must be >= 1, got {repetitions}")
    return Circuit(PROBE_QUBITS, _BLOCK_GATES * repetitions, MEASURED_QUBITS)


def step_plan(repetitions: int) -> StepPlan:
    """Cut points of the probe circuit: 3 per block, last one at the block end."""
    if repetitions < 1:
        raise InvalidArgumentError(f"repetitions must be >= 1, got {repetitions}")
    cuts = tuple(
        GATES_PER_BLOCK * block + cut for block in range(repetitions) for cut in _BLOCK_CUTS
    )
    return StepPlan(cuts)


def prefix(circuit: Circuit, cut: int) -> Circuit:
    """The first ``cut`` gates of ``circuit`` with the same measured qubits."""
    if not 1 <= cut <= circuit.n_gates:
        raise InvalidArgumentError(
            f"cut must be in [1, {circuit.n_gates}], got {cut}"
        )
    return Circuit(circuit.n_qubits, circuit.gates[:cut], circuit.measured_qubits)
