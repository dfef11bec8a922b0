"""Single-qubit Kraus channels and the classical readout confusion matrix.

Every builder returns a list of 2x2 complex Kraus operators satisfying the
completeness relation sum_k K_k^dagger K_k = I to within 1e-12; applying them
as rho -> sum_k K_k rho K_k^dagger is then trace preserving and completely
positive by construction.
"""

import numpy as np

from .errors import InvalidArgumentError

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

COMPLETENESS_ATOL = 1e-12


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or not 0.0 <= value <= 1.0:
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {value}")
    return value


def depolarizing(p: float) -> list[np.ndarray]:
    """Uniform Pauli mixing, rho -> (1-p) rho + p I/2.

    K0 = sqrt(1 - 3p/4) I and K_i = sqrt(p/4) {X, Y, Z}; p = 1 maps every
    state to the maximally mixed state, p = 0 is the identity map.
    """
    p = _check_unit_interval("p", p)
    return [
        np.sqrt(1.0 - 0.75 * p) * _I2,
        np.sqrt(0.25 * p) * _X,
        np.sqrt(0.25 * p) * _Y,
        np.sqrt(0.25 * p) * _Z,
    ]


def amplitude_damping(gamma: float) -> list[np.ndarray]:
    """Energy relaxation toward |0>: |1> decays with probability gamma."""
    gamma = _check_unit_interval("gamma", gamma)
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return [k0, k1]


def phase_damping(lam: float) -> list[np.ndarray]:
    """Pure dephasing: off-diagonal terms shrink by sqrt(1 - lambda)."""
    lam = _check_unit_interval("lambda", lam)
    k0 = np.sqrt(1.0 - lam) * _I2
    k1 = np.array([[np.sqrt(lam), 0.0], [0.0, 0.0]], dtype=complex)
    k2 = np.array([[0.0, 0.0], [0.0, np.sqrt(lam)]], dtype=complex)
    return [k0, k1, k2]


def completeness_defect(kraus: list[np.ndarray]) -> float:
    """max|sum_k K_k^dagger K_k - I|, elementwise over the matrix."""
    if not kraus:
        raise InvalidArgumentError("empty Kraus list")
    dim = kraus[0].shape[0]
    acc = np.zeros((dim, dim), dtype=complex)
    for k in kraus:
        if k.shape != (dim, dim):
            raise InvalidArgumentError(f"inconsistent Kraus shapes: {k.shape} vs {(dim, dim)}")
        acc += k.conj().T @ k
    return float(np.max(np.abs(acc - np.eye(dim))))


def validate_kraus(kraus: list[np.ndarray], atol: float = COMPLETENESS_ATOL) -> None:
    defect = completeness_defect(kraus)
    if defect > atol:
        raise InvalidArgumentError(
            f"Kraus set violates completeness: max deviation {defect:.3e} > {atol:.1e}"
        )


def readout_confusion(e01: float, e10: float) -> np.ndarray:
    """Row-stochastic bit-flip matrix M[true, reported].

    e01 is the probability of reading 1 when the true bit is 0; e10 the
    reverse flip.
    """
    e01 = _check_unit_interval("e01", e01)
    e10 = _check_unit_interval("e10", e10)
    return np.array([[1.0 - e01, e01], [e10, 1.0 - e10]])
