"""Kernel functions and Gram matrices for the SVM.

Three families: linear x.z, polynomial (gamma x.z + coef0)^degree with
degree in {2, 3, 4}, and RBF exp(-gamma |x - z|^2).  All are positive
semidefinite, so any Gram matrix has min eigenvalue >= -1e-8 * trace up to
float roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError, InvalidArgumentError

KERNEL_KINDS = ("linear", "poly", "rbf")
POLY_DEGREES = (2, 3, 4)


@dataclass(frozen=True)
class Kernel:
    """A kernel family with its parameters; hashable so it can key caches."""

    kind: str
    degree: int = 3
    gamma: float = 1.0
    coef0: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in KERNEL_KINDS:
            raise InvalidArgumentError(
                f"kernel kind must be one of {KERNEL_KINDS}, got {self.kind!r}"
            )
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "coef0", float(self.coef0))
        if self.kind == "poly" and self.degree not in POLY_DEGREES:
            raise InvalidArgumentError(
                f"poly degree must be one of {POLY_DEGREES}, got {self.degree}"
            )
        if self.kind in ("poly", "rbf") and not self.gamma > 0:
            raise InvalidArgumentError(f"gamma must be > 0, got {self.gamma}")
        if self.kind == "poly" and self.coef0 < 0:
            raise InvalidArgumentError(f"coef0 must be >= 0, got {self.coef0}")

    def label(self) -> str:
        if self.kind == "linear":
            return "linear"
        if self.kind == "poly":
            return f"poly{self.degree}"
        return f"rbf(g={self.gamma:g})"

    def to_json_dict(self) -> dict:
        if self.kind == "linear":
            return {"kind": "linear"}
        if self.kind == "poly":
            return {"kind": "poly", "degree": self.degree, "gamma": self.gamma,
                    "coef0": self.coef0}
        return {"kind": "rbf", "gamma": self.gamma}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Kernel":
        try:
            kind = obj["kind"]
            if kind == "linear":
                return cls("linear")
            if kind == "poly":
                return cls("poly", degree=obj["degree"], gamma=obj.get("gamma", 1.0),
                           coef0=obj.get("coef0", 1.0))
            if kind == "rbf":
                return cls("rbf", gamma=obj["gamma"])
            raise DataFormatError(f"unknown kernel kind {kind!r}")
        except InvalidArgumentError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"malformed kernel object: {exc}") from exc


def linear() -> Kernel:
    return Kernel("linear")


def poly(degree: int, gamma: float = 1.0, coef0: float = 1.0) -> Kernel:
    return Kernel("poly", degree=degree, gamma=gamma, coef0=coef0)


def rbf(gamma: float) -> Kernel:
    return Kernel("rbf", gamma=gamma)


def _as_matrix(x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2:
        raise InvalidArgumentError(f"{name} must be a vector or matrix, got ndim={x.ndim}")
    return x


def kernel_matrix(kernel: Kernel, x: np.ndarray, z: np.ndarray | None = None) -> np.ndarray:
    """K[i, j] = k(x_i, z_j); z defaults to x (the Gram case)."""
    x = _as_matrix(x, "x")
    symmetric = z is None
    z = x if symmetric else _as_matrix(z, "z")
    if x.shape[1] != z.shape[1]:
        raise InvalidArgumentError(
            f"feature dimensions differ: {x.shape[1]} vs {z.shape[1]}"
        )
    inner = x @ z.T
    if kernel.kind == "linear":
        return inner
    if kernel.kind == "poly":
        return (kernel.gamma * inner + kernel.coef0) ** kernel.degree
    sq = (x * x).sum(axis=1)[:, None] + (z * z).sum(axis=1)[None, :] - 2.0 * inner
    np.maximum(sq, 0.0, out=sq)
    if symmetric:
        np.fill_diagonal(sq, 0.0)  # k(x, x) = 1 exactly, not exp(-eps)
    return np.exp(-kernel.gamma * sq)


def gram(x: np.ndarray, kernel: Kernel) -> np.ndarray:
    """The symmetric kernel matrix of one sample set, C-contiguous."""
    return np.ascontiguousarray(kernel_matrix(kernel, x))
