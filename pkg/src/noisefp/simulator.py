"""Density-matrix simulation of noisy virtual devices.

State convention is big-endian: qubit 0 is the most significant bit of a
computational basis index, so basis state |q0 q1 ... q_{n-1}> has index
sum_q bit(q) * 2**(n-1-q).  Reshaping a 2^n x 2^n density matrix to
(2,)*n + (2,)*n row-major makes tensor axis q (and n + q on the column side)
correspond directly to qubit q.

A ``NoiseModel`` attaches three Kraus channels after every gate on each
operand qubit (depolarizing with a 1-qubit or 2-qubit strength, then
amplitude damping, then phase damping) plus a classical readout confusion
applied to the measured marginal.  Parameters are scalars or per-qubit maps
and may drift over wall-clock time.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from . import channels
from .circuit import Circuit, Gate, GateKind, StepPlan
from .errors import DataFormatError, InvalidArgumentError, NumericError

_SQRT_HALF = 1.0 / math.sqrt(2.0)

# Operand order of multi-qubit matrices matches Gate.qubits: controls first,
# target last, contiguous big-endian.
GATE_MATRICES: dict[GateKind, np.ndarray] = {
    GateKind.H: np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    GateKind.TOFFOLI: np.eye(8, dtype=complex)[[0, 1, 2, 3, 4, 5, 7, 6]],
}

MAX_DENSITY_QUBITS = 12
MAX_STATEVECTOR_QUBITS = 24


def outcome_labels(n_bits: int) -> tuple[str, ...]:
    """Bitstring labels in ascending binary order, e.g. ('00','01','10','11')."""
    return tuple(format(i, f"0{n_bits}b") for i in range(2**n_bits))


def zero_state(n_qubits: int) -> np.ndarray:
    """|0...0><0...0| as a dense 2^n x 2^n complex matrix."""
    if n_qubits < 1:
        raise InvalidArgumentError(f"n_qubits must be >= 1, got {n_qubits}")
    dim = 2**n_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def _n_qubits_of(rho: np.ndarray) -> int:
    dim = rho.shape[0]
    if rho.ndim != 2 or rho.shape[1] != dim or dim & (dim - 1) or dim < 2:
        raise InvalidArgumentError(f"not a 2^n x 2^n matrix: shape {rho.shape}")
    return dim.bit_length() - 1


def _apply_matrix_tensor(rho_t: np.ndarray, op: np.ndarray, qubits: tuple[int, ...],
                         n: int) -> np.ndarray:
    """rho_t -> (op rho op^dagger) on the given tensor axes of a (2,)*2n array."""
    k = len(qubits)
    op_t = op.reshape((2,) * (2 * k))
    row_axes = list(qubits)
    col_axes = [n + q for q in qubits]
    # Left-multiply on the row axes, then right-multiply by op^dagger on the
    # column axes (conjugate only: the transpose is absorbed by tensordot).
    rho_t = np.tensordot(op_t, rho_t, axes=(list(range(k, 2 * k)), row_axes))
    rho_t = np.moveaxis(rho_t, list(range(k)), row_axes)
    rho_t = np.tensordot(op_t.conj(), rho_t, axes=(list(range(k, 2 * k)), col_axes))
    return np.moveaxis(rho_t, list(range(k)), col_axes)


def _check_qubits(qubits: tuple[int, ...], n: int) -> tuple[int, ...]:
    qubits = tuple(int(q) for q in qubits)
    if len(set(qubits)) != len(qubits):
        raise InvalidArgumentError(f"operand qubits must be distinct, got {qubits}")
    if any(q < 0 or q >= n for q in qubits):
        raise InvalidArgumentError(f"operand qubits {qubits} out of range for n={n}")
    return qubits


def apply_unitary(rho: np.ndarray, u: np.ndarray, qubits: tuple[int, ...]) -> np.ndarray:
    """U rho U^dagger with U acting on the listed qubits."""
    n = _n_qubits_of(rho)
    qubits = _check_qubits(qubits, n)
    k = len(qubits)
    if u.shape != (2**k, 2**k):
        raise InvalidArgumentError(f"unitary shape {u.shape} does not match {k} qubit(s)")
    rho_t = rho.reshape((2,) * (2 * n))
    rho_t = _apply_matrix_tensor(rho_t, u.astype(complex), qubits, n)
    return rho_t.reshape(2**n, 2**n)


def apply_gate(rho: np.ndarray, gate: Gate) -> np.ndarray:
    return apply_unitary(rho, GATE_MATRICES[gate.kind], gate.qubits)


def apply_channel(rho: np.ndarray, kraus: list[np.ndarray],
                  qubits: tuple[int, ...] | None = None) -> np.ndarray:
    """sum_k K rho K^dagger; validates Kraus completeness first.

    With ``qubits=None`` the operators must match the full dimension of rho;
    otherwise they act on the listed qubits.
    """
    channels.validate_kraus(kraus)
    n = _n_qubits_of(rho)
    if qubits is None:
        k_bits = _n_qubits_of(kraus[0])
        if k_bits != n:
            raise InvalidArgumentError(
                f"Kraus dimension 2^{k_bits} does not match state dimension 2^{n}"
            )
        qubits = tuple(range(n))
    else:
        qubits = _check_qubits(qubits, n)
        if kraus[0].shape != (2 ** len(qubits), 2 ** len(qubits)):
            raise InvalidArgumentError(
                f"Kraus shape {kraus[0].shape} does not match {len(qubits)} qubit(s)"
            )
    rho_t = rho.reshape((2,) * (2 * n))
    out = np.zeros_like(rho_t)
    for op in kraus:
        out += _apply_matrix_tensor(rho_t, op.astype(complex), qubits, n)
    return out.reshape(2**n, 2**n)


def born_marginal(rho: np.ndarray, measured_qubits: tuple[int, ...]) -> np.ndarray:
    """Outcome probabilities of the measured qubits, in their listed bit order."""
    n = _n_qubits_of(rho)
    measured = _check_qubits(measured_qubits, n)
    diag = np.real(np.diagonal(rho))
    lowest = float(diag.min())
    if lowest < -1e-10:
        raise NumericError(f"density matrix has negative population {lowest:.3e}")
    diag = np.where(diag < 0.0, 0.0, diag)
    diag_t = diag.reshape((2,) * n)
    rest = [q for q in range(n) if q not in measured]
    marg = diag_t.transpose(list(measured) + rest).reshape(2 ** len(measured), -1).sum(axis=1)
    return marg


# ---------------------------------------------------------------------------
# Noise models and virtual devices
# ---------------------------------------------------------------------------

PARAM_NAMES = ("p1", "p2", "gamma", "lambda", "e01", "e10")

ParamValue = float | Mapping[int, float]


@dataclass(frozen=True)
class DriftSpec:
    """Time dependence of one parameter.

    Either a linear ``rate_per_hour`` added to the base value, or an absolute
    piecewise-linear ``schedule`` of (t_hours, value) knots that replaces the
    base.  Values are clamped to [0, 1] after evaluation.
    """

    param: str
    rate_per_hour: float = 0.0
    schedule: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self) -> None:
        if self.param not in PARAM_NAMES:
            raise InvalidArgumentError(
                f"unknown drift parameter {self.param!r}, expected one of {PARAM_NAMES}"
            )
        if self.schedule is not None:
            if self.rate_per_hour:
                raise InvalidArgumentError("give either rate_per_hour or schedule, not both")
            knots = tuple((float(t), float(v)) for t, v in self.schedule)
            object.__setattr__(self, "schedule", knots)
            if len(knots) < 2:
                raise InvalidArgumentError("a schedule needs at least two knots")
            if any(b[0] <= a[0] for a, b in zip(knots, knots[1:])):
                raise InvalidArgumentError("schedule knots must have strictly increasing times")

    def value_at(self, base: float, t_hours: float) -> float:
        if self.schedule is not None:
            times = [k[0] for k in self.schedule]
            values = [k[1] for k in self.schedule]
            v = float(np.interp(t_hours, times, values))
        else:
            v = base + self.rate_per_hour * t_hours
        return min(1.0, max(0.0, v))


def _as_param(name: str, value) -> ParamValue:
    if isinstance(value, Mapping):
        out = {}
        for key, v in value.items():
            qubit = key if key == "default" else int(key)
            v = float(v)
            if not np.isfinite(v) or not 0.0 <= v <= 1.0:
                raise InvalidArgumentError(f"{name}[{key}] must lie in [0, 1], got {v}")
            out[qubit] = v
        return out
    value = float(value)
    if not np.isfinite(value) or not 0.0 <= value <= 1.0:
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate channel strengths plus readout flip probabilities.

    ``p1``/``p2`` are depolarizing strengths after 1-qubit and multi-qubit
    gates, ``gamma`` amplitude damping, ``lam`` phase damping, ``e01``/``e10``
    the readout confusion.  Each parameter is a scalar or a {qubit: value}
    map with an optional "default" key.
    """

    p1: ParamValue = 0.0
    p2: ParamValue = 0.0
    gamma: ParamValue = 0.0
    lam: ParamValue = 0.0
    e01: ParamValue = 0.0
    e10: ParamValue = 0.0
    drift: tuple[DriftSpec, ...] = ()

    _FIELD_OF = {
        "p1": "p1", "p2": "p2", "gamma": "gamma",
        "lambda": "lam", "e01": "e01", "e10": "e10",
    }

    def __post_init__(self) -> None:
        for json_name, attr in self._FIELD_OF.items():
            object.__setattr__(self, attr, _as_param(json_name, getattr(self, attr)))
        object.__setattr__(self, "drift", tuple(self.drift))
        seen = set()
        for spec in self.drift:
            if not isinstance(spec, DriftSpec):
                raise InvalidArgumentError(f"drift entries must be DriftSpec, got {spec!r}")
            if spec.param in seen:
                raise InvalidArgumentError(f"duplicate drift entry for {spec.param!r}")
            seen.add(spec.param)

    def base_value(self, param: str, qubit: int) -> float:
        if param not in self._FIELD_OF:
            raise InvalidArgumentError(f"unknown parameter {param!r}")
        raw = getattr(self, self._FIELD_OF[param])
        if isinstance(raw, Mapping):
            if qubit in raw:
                return raw[qubit]
            if "default" in raw:
                return raw["default"]
            return 0.0
        return raw

    def value(self, param: str, qubit: int, t_hours: float = 0.0) -> float:
        """Parameter value for one qubit at time t, drift applied and clamped."""
        base = self.base_value(param, qubit)
        for spec in self.drift:
            if spec.param == param:
                return spec.value_at(base, t_hours)
        return base

    def resolved_key(self, n_qubits: int, t_hours: float = 0.0) -> tuple[float, ...]:
        """All effective parameter values at time t; equal keys mean equal physics."""
        return tuple(
            self.value(p, q, t_hours) for p in PARAM_NAMES for q in range(n_qubits)
        )

    def to_json_dict(self) -> dict:
        def encode(raw):
            if isinstance(raw, Mapping):
                return {str(k): v for k, v in raw.items()}
            return raw

        obj = {
            "p1": encode(self.p1),
            "p2": encode(self.p2),
            "gamma": encode(self.gamma),
            "lambda": encode(self.lam),
            "readout": {"e01": encode(self.e01), "e10": encode(self.e10)},
        }
        if self.drift:
            obj["drift"] = [
                {"param": d.param, "schedule": [list(k) for k in d.schedule]}
                if d.schedule is not None
                else {"param": d.param, "rate_per_hour": d.rate_per_hour}
                for d in self.drift
            ]
        return obj

    @classmethod
    def from_json_dict(cls, obj: dict) -> "NoiseModel":
        try:
            readout = obj.get("readout", {})
            drift = tuple(
                DriftSpec(
                    param=d["param"],
                    rate_per_hour=float(d.get("rate_per_hour", 0.0)),
                    schedule=tuple(tuple(k) for k in d["schedule"]) if "schedule" in d else None,
                )
                for d in obj.get("drift", ())
            )
            return cls(
                p1=obj.get("p1", 0.0),
                p2=obj.get("p2", 0.0),
                gamma=obj.get("gamma", 0.0),
                lam=obj.get("lambda", 0.0),
                e01=readout.get("e01", 0.0),
                e10=readout.get("e10", 0.0),
                drift=drift,
            )
        except InvalidArgumentError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"malformed noise model: {exc}") from exc


ZERO_NOISE = NoiseModel()


@dataclass(frozen=True)
class VirtualDevice:
    """A named noise model with the seed that anchors its sampling streams."""

    name: str
    noise: NoiseModel
    seed: int

    def __post_init__(self) -> None:
        if not self.name:
            raise InvalidArgumentError("device name must be non-empty")
        if int(self.seed) < 0:
            raise InvalidArgumentError(f"seed must be non-negative, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))

    def to_json_dict(self) -> dict:
        return {"name": self.name, "seed": self.seed, "noise": self.noise.to_json_dict()}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "VirtualDevice":
        try:
            return cls(
                name=str(obj["name"]),
                noise=NoiseModel.from_json_dict(obj.get("noise", {})),
                seed=int(obj["seed"]),
            )
        except InvalidArgumentError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"malformed device object: {exc}") from exc


def load_device(path: str) -> VirtualDevice:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read device file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: device JSON does not parse: {exc}") from exc
    return VirtualDevice.from_json_dict(obj)


def save_device(device: VirtualDevice, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(device.to_json_dict(), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------


def _apply_gate_noise(rho: np.ndarray, gate: Gate, noise: NoiseModel,
                      t_hours: float) -> np.ndarray:
    dep_param = "p1" if len(gate.qubits) == 1 else "p2"
    for q in gate.qubits:
        p = noise.value(dep_param, q, t_hours)
        if p > 0.0:
            rho = apply_channel(rho, channels.depolarizing(p), (q,))
        g = noise.value("gamma", q, t_hours)
        if g > 0.0:
            rho = apply_channel(rho, channels.amplitude_damping(g), (q,))
        lam = noise.value("lambda", q, t_hours)
        if lam > 0.0:
            rho = apply_channel(rho, channels.phase_damping(lam), (q,))
    return rho


def _apply_readout(dist: np.ndarray, noise: NoiseModel,
                   measured_qubits: tuple[int, ...], t_hours: float) -> np.ndarray:
    out = dist.reshape((2,) * len(measured_qubits))
    for axis, q in enumerate(measured_qubits):
        m = channels.readout_confusion(
            noise.value("e01", q, t_hours), noise.value("e10", q, t_hours)
        )
        # Contract the true-bit axis: p_reported = sum_true p_true M[true, rep].
        out = np.moveaxis(np.tensordot(out, m, axes=([axis], [0])), -1, axis)
    return out.reshape(-1)


def exact_distribution(circuit: Circuit, noise: NoiseModel = ZERO_NOISE,
                       t_hours: float = 0.0) -> np.ndarray:
    """Exact outcome distribution of the noisy circuit at time t.

    Index i corresponds to ``outcome_labels(k)[i]`` where k is the number of
    measured qubits; the first measured qubit is the leftmost bit.
    """
    if circuit.n_qubits > MAX_DENSITY_QUBITS:
        raise InvalidArgumentError(
            f"density-matrix evolution supports <= {MAX_DENSITY_QUBITS} qubits, "
            f"got {circuit.n_qubits}"
        )
    rho = zero_state(circuit.n_qubits)
    for gate in circuit.gates:
        rho = apply_gate(rho, gate)
        rho = _apply_gate_noise(rho, gate, noise, t_hours)
    dist = born_marginal(rho, circuit.measured_qubits)
    return _apply_readout(dist, noise, circuit.measured_qubits, t_hours)


def step_distributions(circuit: Circuit, plan: StepPlan,
                       noise: NoiseModel = ZERO_NOISE,
                       t_hours: float = 0.0) -> list[np.ndarray]:
    """Distribution at every cut point from a single evolution pass.

    Bit-identical to calling ``exact_distribution`` on each prefix: the gate
    and channel applications happen in the same order on the same state.
    """
    if circuit.n_qubits > MAX_DENSITY_QUBITS:
        raise InvalidArgumentError(
            f"density-matrix evolution supports <= {MAX_DENSITY_QUBITS} qubits, "
            f"got {circuit.n_qubits}"
        )
    if plan.cut_points[-1] > circuit.n_gates:
        raise InvalidArgumentError(
            f"cut point {plan.cut_points[-1]} exceeds circuit length {circuit.n_gates}"
        )
    cuts = set(plan.cut_points)
    rho = zero_state(circuit.n_qubits)
    out = []
    for position, gate in enumerate(circuit.gates, start=1):
        rho = apply_gate(rho, gate)
        rho = _apply_gate_noise(rho, gate, noise, t_hours)
        if position in cuts:
            dist = born_marginal(rho, circuit.measured_qubits)
            out.append(_apply_readout(dist, noise, circuit.measured_qubits, t_hours))
    return out


def ideal_distribution(circuit: Circuit) -> np.ndarray:
    """Noiseless reference distribution via statevector evolution.

    Independent of the density-matrix path: amplitudes are propagated as a
    (2,)*n tensor and probabilities read off as |amplitude|^2.
    """
    n = circuit.n_qubits
    if n > MAX_STATEVECTOR_QUBITS:
        raise InvalidArgumentError(
            f"statevector evolution supports <= {MAX_STATEVECTOR_QUBITS} qubits, got {n}"
        )
    psi = np.zeros((2,) * n, dtype=complex)
    psi[(0,) * n] = 1.0
    for gate in circuit.gates:
        u = GATE_MATRICES[gate.kind]
        k = len(gate.qubits)
        u_t = u.reshape((2,) * (2 * k))
        psi = np.tensordot(u_t, psi, axes=(list(range(k, 2 * k)), list(gate.qubits)))
        psi = np.moveaxis(psi, list(range(k)), list(gate.qubits))
    probs = np.abs(psi) ** 2
    measured = list(circuit.measured_qubits)
    rest = [q for q in range(n) if q not in circuit.measured_qubits]
    return probs.transpose(measured + rest).reshape(2 ** len(measured), -1).sum(axis=1)


def validate_distribution(dist: np.ndarray, atol: float = 1e-12) -> None:
    dist = np.asarray(dist)
    if not np.all(np.isfinite(dist)):
        raise NumericError("distribution contains non-finite entries")
    if dist.min() < -atol or dist.max() > 1.0 + atol:
        raise NumericError(f"distribution entries outside [0, 1]: {dist}")
    total = float(dist.sum())
    if abs(total - 1.0) > atol:
        raise NumericError(f"distribution sums to {total}, not 1")


def sample_counts(dist: np.ndarray, shots: int, rng: np.random.Generator) -> dict[str, int]:
    """Multinomial shot counts for every outcome label, zeros included."""
    if shots < 1:
        raise InvalidArgumentError(f"shots must be >= 1, got {shots}")
    dist = np.asarray(dist, dtype=float)
    validate_distribution(dist, atol=1e-9)
    n_bits = (dist.size - 1).bit_length()
    if dist.size != 2**n_bits:
        raise InvalidArgumentError(f"distribution length {dist.size} is not a power of 2")
    pvals = np.clip(dist, 0.0, None)
    pvals = pvals / pvals.sum()
    draws = rng.multinomial(shots, pvals)
    return {label: int(c) for label, c in zip(outcome_labels(n_bits), draws)}
