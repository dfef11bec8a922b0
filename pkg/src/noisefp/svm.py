"""Kernel SVM training, multiclass wrappers, and validation-driven selection.

Everything runs on precomputed Gram matrices: ``model_select`` computes one
Gram (and one train-by-validation block) per kernel family and reuses them
across the whole C grid, so the only per-candidate cost is the SMO solve.
The test set enters exactly once, for the candidate that won on validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._smo import IMPLEMENTATION, dual_objective, kkt_violation, solve
from .errors import DataFormatError, InvalidArgumentError, NumericError
from .kernels import Kernel, kernel_matrix, gram, linear, poly, rbf

__all__ = [
    "SvmModel", "OvoModel", "OvaModel", "Candidate", "CandidateResult",
    "SelectionReport", "train_binary", "train_ovo", "train_ova",
    "decision_function", "predict", "predict_ovo", "predict_ova",
    "default_kernels", "default_candidates", "model_select",
    "save_model", "load_model", "accuracy", "IMPLEMENTATION",
    "dual_objective", "kkt_violation",
]

DEFAULT_C_GRID = (0.1, 1.0, 10.0, 100.0)
DEFAULT_TOL = 1e-3
DEFAULT_MAX_PASSES = 100


@dataclass
class SvmModel:
    """A trained binary classifier in dual form.

    ``dual_coef[i]`` is alpha_i * y_i for the i-th support vector; the
    decision value of x is sum_i dual_coef[i] k(sv_i, x) + bias.
    """

    kernel: Kernel
    support_vectors: np.ndarray
    dual_coef: np.ndarray
    bias: float
    C: float
    tol: float
    sweeps: int
    converged: bool

    def __post_init__(self) -> None:
        self.support_vectors = np.asarray(self.support_vectors, dtype=np.float64)
        self.dual_coef = np.asarray(self.dual_coef, dtype=np.float64)
        if self.support_vectors.ndim != 2 or self.support_vectors.shape[0] == 0:
            raise NumericError("model has no support vectors")
        if self.dual_coef.shape != (self.support_vectors.shape[0],):
            raise InvalidArgumentError(
                f"{self.dual_coef.shape[0]} coefficients for "
                f"{self.support_vectors.shape[0]} support vectors"
            )

    @property
    def n_features(self) -> int:
        return int(self.support_vectors.shape[1])

    def to_json_dict(self) -> dict:
        return {
            "type": "binary",
            "kernel": self.kernel.to_json_dict(),
            "C": self.C,
            "tol": self.tol,
            "sweeps": self.sweeps,
            "converged": self.converged,
            "bias": self.bias,
            "dual_coef": [float(v) for v in self.dual_coef],
            "support_vectors": [[float(v) for v in row] for row in self.support_vectors],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SvmModel":
        try:
            return cls(
                kernel=Kernel.from_json_dict(obj["kernel"]),
                support_vectors=np.array(obj["support_vectors"], dtype=np.float64),
                dual_coef=np.array(obj["dual_coef"], dtype=np.float64),
                bias=float(obj["bias"]),
                C=float(obj["C"]),
                tol=float(obj["tol"]),
                sweeps=int(obj["sweeps"]),
                converged=bool(obj["converged"]),
            )
        except (InvalidArgumentError, DataFormatError):
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"malformed binary model: {exc}") from exc


def decision_function(model: SvmModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    k = kernel_matrix(model.kernel, model.support_vectors, x)
    dec = model.dual_coef @ k + model.bias
    return dec[0] if squeeze else dec


def predict(model: SvmModel, x: np.ndarray):
    """Sign of the decision value; exact zero maps to +1 by convention."""
    dec = decision_function(model, x)
    if np.ndim(dec) == 0:
        return 1 if dec >= 0.0 else -1
    return np.where(dec >= 0.0, 1, -1)


def _check_binary_labels(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).ravel()
    if not np.all(np.abs(y) == 1.0):
        raise InvalidArgumentError("labels must be exactly +1 or -1")
    if np.all(y == y[0]):
        raise InvalidArgumentError("training needs both classes present")
    return y


@dataclass
class _BinaryFit:
    """A solved dual over some training subset, kept dense for reuse."""

    alpha: np.ndarray          # full length over its training subset
    b: float
    y: np.ndarray
    indices: np.ndarray        # positions of the subset in the outer train set
    sweeps: int
    converged: bool

    def decision_from_cols(self, kernel_cols: np.ndarray) -> np.ndarray:
        """Decision values given k(train_i, eval_j) columns of the outer set."""
        return (self.alpha * self.y) @ kernel_cols[self.indices] + self.b

    def to_model(self, x_train: np.ndarray, kernel: Kernel, c: float,
                 tol: float) -> SvmModel:
        x = x_train[self.indices]
        sv = self.alpha > 0.0
        if not sv.any():
            raise NumericError(
                "training produced no support vectors (degenerate inputs)"
            )
        return SvmModel(
            kernel=kernel,
            support_vectors=x[sv],
            dual_coef=(self.alpha * self.y)[sv],
            bias=self.b,
            C=c,
            tol=tol,
            sweeps=self.sweeps,
            converged=self.converged,
        )


def _fit_on_gram(g_sub: np.ndarray, y: np.ndarray, indices: np.ndarray, c: float,
                 tol: float, max_passes: int,
                 max_total_sweeps: int | None) -> _BinaryFit:
    alpha, b, sweeps, converged = solve(
        g_sub, y, c, tol=tol, max_passes=max_passes, max_total_sweeps=max_total_sweeps
    )
    return _BinaryFit(alpha=alpha, b=b, y=y, indices=indices, sweeps=sweeps,
                      converged=converged)


def train_binary(x: np.ndarray, y: np.ndarray, kernel: Kernel, c: float,
                 tol: float = DEFAULT_TOL, max_passes: int = DEFAULT_MAX_PASSES,
                 max_total_sweeps: int | None = None) -> SvmModel:
    """Soft-margin kernel SVM via SMO on labels in {-1, +1}."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise InvalidArgumentError(f"x must be a 2-D matrix, got ndim={x.ndim}")
    y = _check_binary_labels(y)
    if y.shape[0] != x.shape[0]:
        raise InvalidArgumentError(
            f"{y.shape[0]} labels for {x.shape[0]} examples"
        )
    g = gram(x, kernel)
    fit = _fit_on_gram(g, y, np.arange(x.shape[0]), c, tol, max_passes,
                       max_total_sweeps)
    return fit.to_model(x, kernel, c, tol)


# ---------------------------------------------------------------------------
# Multiclass wrappers
# ---------------------------------------------------------------------------


@dataclass
class OvoModel:
    """One binary model per unordered class pair; majority vote predicts.

    For the pair (a, b) with a < b the submodel's +1 side is class a.
    """

    n_classes: int
    class_pairs: tuple[tuple[int, int], ...]
    models: tuple[SvmModel, ...]

    def __post_init__(self) -> None:
        self.class_pairs = tuple((int(a), int(b)) for a, b in self.class_pairs)
        self.models = tuple(self.models)
        k = self.n_classes
        expected = [(a, b) for a in range(k) for b in range(a + 1, k)]
        if list(self.class_pairs) != expected or len(self.models) != len(expected):
            raise InvalidArgumentError(
                f"OVO over {k} classes needs the {len(expected)} canonical pairs"
            )

    def to_json_dict(self) -> dict:
        return {
            "type": "ovo",
            "n_classes": self.n_classes,
            "pairs": [list(p) for p in self.class_pairs],
            "models": [m.to_json_dict() for m in self.models],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "OvoModel":
        try:
            return cls(
                n_classes=int(obj["n_classes"]),
                class_pairs=tuple(tuple(p) for p in obj["pairs"]),
                models=tuple(SvmModel.from_json_dict(m) for m in obj["models"]),
            )
        except (InvalidArgumentError, DataFormatError):
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"malformed OVO model: {exc}") from exc


@dataclass
class OvaModel:
    """One binary model per class (+1 = that class); highest decision wins."""

    n_classes: int
    models: tuple[SvmModel, ...]

    def __post_init__(self) -> None:
        self.models = tuple(self.models)
        if len(self.models) != self.n_classes:
            raise InvalidArgumentError(
                f"OVA over {self.n_classes} classes needs {self.n_classes} models"
            )

    def to_json_dict(self) -> dict:
        return {
            "type": "ova",
            "n_classes": self.n_classes,
            "models": [m.to_json_dict() for m in self.models],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "OvaModel":
        try:
            return cls(
                n_classes=int(obj["n_classes"]),
                models=tuple(SvmModel.from_json_dict(m) for m in obj["models"]),
            )
        except (InvalidArgumentError, DataFormatError):
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"malformed OVA model: {exc}") from exc


def _check_class_labels(labels: np.ndarray) -> tuple[np.ndarray, int]:
    labels = np.asarray(labels, dtype=np.int64).ravel()
    if labels.size == 0:
        raise InvalidArgumentError("no labels given")
    classes = np.unique(labels)
    k = int(classes[-1]) + 1
    if classes[0] < 0 or not np.array_equal(classes, np.arange(k)):
        raise InvalidArgumentError(
            f"labels must cover 0..k-1 contiguously, got classes {classes.tolist()}"
        )
    if k < 2:
        raise InvalidArgumentError("need at least 2 classes")
    return labels, k


def train_ovo(x: np.ndarray, labels: np.ndarray, kernel: Kernel, c: float,
              tol: float = DEFAULT_TOL, max_passes: int = DEFAULT_MAX_PASSES,
              max_total_sweeps: int | None = None) -> OvoModel:
    x = np.asarray(x, dtype=np.float64)
    labels, k = _check_class_labels(labels)
    g = gram(x, kernel)
    pairs, models = [], []
    for a in range(k):
        for b in range(a + 1, k):
            idx = np.flatnonzero((labels == a) | (labels == b))
            y = np.where(labels[idx] == a, 1.0, -1.0)
            fit = _fit_on_gram(np.ascontiguousarray(g[np.ix_(idx, idx)]), y, idx,
                               c, tol, max_passes, max_total_sweeps)
            pairs.append((a, b))
            models.append(fit.to_model(x, kernel, c, tol))
    return OvoModel(n_classes=k, class_pairs=tuple(pairs), models=tuple(models))


def train_ova(x: np.ndarray, labels: np.ndarray, kernel: Kernel, c: float,
              tol: float = DEFAULT_TOL, max_passes: int = DEFAULT_MAX_PASSES,
              max_total_sweeps: int | None = None) -> OvaModel:
    x = np.asarray(x, dtype=np.float64)
    labels, k = _check_class_labels(labels)
    g = gram(x, kernel)
    indices = np.arange(x.shape[0])
    models = []
    for a in range(k):
        y = np.where(labels == a, 1.0, -1.0)
        fit = _fit_on_gram(g, y, indices, c, tol, max_passes, max_total_sweeps)
        models.append(fit.to_model(x, kernel, c, tol))
    return OvaModel(n_classes=k, models=tuple(models))


def _vote(decisions: np.ndarray, pairs: Sequence[tuple[int, int]],
          n_classes: int) -> np.ndarray:
    """OVO majority vote; ties by summed |decision|, then lowest class id."""
    n = decisions.shape[1]
    votes = np.zeros((n, n_classes), dtype=np.int64)
    strength = np.zeros((n, n_classes), dtype=np.float64)
    for row, (a, b) in enumerate(pairs):
        dec = decisions[row]
        pick_a = dec >= 0.0
        votes[pick_a, a] += 1
        votes[~pick_a, b] += 1
        strength[pick_a, a] += np.abs(dec[pick_a])
        strength[~pick_a, b] += np.abs(dec[~pick_a])
    out = np.empty(n, dtype=np.int64)
    ids = np.arange(n_classes)
    for i in range(n):
        order = np.lexsort((ids, -strength[i], -votes[i]))
        out[i] = order[0]
    return out


def predict_ovo(ovo: OvoModel, x: np.ndarray):
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[None, :]
    decisions = np.stack([decision_function(m, x) for m in ovo.models])
    labels = _vote(decisions, ovo.class_pairs, ovo.n_classes)
    return int(labels[0]) if squeeze else labels


def predict_ova(ova: OvaModel, x: np.ndarray):
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[None, :]
    decisions = np.stack([decision_function(m, x) for m in ova.models])
    labels = np.argmax(decisions, axis=0).astype(np.int64)  # first max: lowest id
    return int(labels[0]) if squeeze else labels


# ---------------------------------------------------------------------------
# Model selection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    name: str
    kernel: Kernel
    C: float


def default_kernels(n_features: int,
                    rbf_gammas: Sequence[float] | None = None) -> tuple[Kernel, ...]:
    """Canonical kernel order: linear, poly 2..4, then the RBF gamma grid."""
    if n_features < 1:
        raise InvalidArgumentError(f"n_features must be >= 1, got {n_features}")
    g0 = 1.0 / n_features
    if rbf_gammas is None:
        rbf_gammas = (g0, 1.0, 10.0)
    return (
        linear(),
        poly(2, gamma=g0, coef0=1.0),
        poly(3, gamma=g0, coef0=1.0),
        poly(4, gamma=g0, coef0=1.0),
        *(rbf(g) for g in rbf_gammas),
    )


def default_candidates(n_features: int, c_grid: Sequence[float] = DEFAULT_C_GRID,
                       rbf_gammas: Sequence[float] | None = None) -> list[Candidate]:
    c_grid = tuple(float(c) for c in c_grid)
    if not c_grid or any(c <= 0 for c in c_grid):
        raise InvalidArgumentError(f"C grid must be positive, got {c_grid}")
    return [
        Candidate(name=f"{kernel.label()} C={c:g}", kernel=kernel, C=c)
        for kernel in default_kernels(n_features, rbf_gammas)
        for c in c_grid
    ]


@dataclass
class CandidateResult:
    name: str
    kernel: Kernel
    C: float
    val_accuracy: float | None
    converged: bool | None
    error: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "kernel": self.kernel.to_json_dict(),
            "C": self.C,
            "val_accuracy": self.val_accuracy,
            "converged": self.converged,
            "error": self.error,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "CandidateResult":
        return cls(
            name=str(obj["name"]),
            kernel=Kernel.from_json_dict(obj["kernel"]),
            C=float(obj["C"]),
            val_accuracy=None if obj["val_accuracy"] is None else float(obj["val_accuracy"]),
            converged=None if obj["converged"] is None else bool(obj["converged"]),
            error=obj.get("error"),
        )


@dataclass
class SelectionReport:
    """Validation accuracies of every candidate plus the winner's test score."""

    results: tuple[CandidateResult, ...]
    chosen_index: int
    test_accuracy: float
    n_classes: int
    class_strategy: str  # "binary", "ovo" or "ova"
    chosen_model: object | None = field(default=None, repr=False, compare=False)

    @property
    def chosen(self) -> CandidateResult:
        return self.results[self.chosen_index]

    def to_json_dict(self) -> dict:
        return {
            "type": "selection",
            "n_classes": self.n_classes,
            "class_strategy": self.class_strategy,
            "chosen_index": self.chosen_index,
            "chosen_name": self.chosen.name,
            "val_accuracy": self.chosen.val_accuracy,
            "test_accuracy": self.test_accuracy,
            "candidates": [r.to_json_dict() for r in self.results],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SelectionReport":
        try:
            return cls(
                results=tuple(
                    CandidateResult.from_json_dict(r) for r in obj["candidates"]
                ),
                chosen_index=int(obj["chosen_index"]),
                test_accuracy=float(obj["test_accuracy"]),
                n_classes=int(obj["n_classes"]),
                class_strategy=str(obj["class_strategy"]),
            )
        except (InvalidArgumentError, DataFormatError):
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"malformed selection report: {exc}") from exc


def accuracy(predicted: np.ndarray, expected: np.ndarray) -> float:
    predicted = np.asarray(predicted).ravel()
    expected = np.asarray(expected).ravel()
    if predicted.shape != expected.shape or predicted.size == 0:
        raise InvalidArgumentError("prediction/label shapes differ or are empty")
    return float(np.mean(predicted == expected))


class _CandidatePredictor:
    """Trained fits for one candidate, able to label new points via kernel
    columns against the training set (no kernel recomputation)."""

    def __init__(self, strategy: str, fits: list[_BinaryFit],
                 pairs: list[tuple[int, int]], n_classes: int):
        self.strategy = strategy
        self.fits = fits
        self.pairs = pairs
        self.n_classes = n_classes

    @property
    def converged(self) -> bool:
        return all(f.converged for f in self.fits)

    def predict_from_cols(self, kernel_cols: np.ndarray) -> np.ndarray:
        if self.strategy == "binary":
            dec = self.fits[0].decision_from_cols(kernel_cols)
            return np.where(dec >= 0.0, 1, 0).astype(np.int64)
        decisions = np.stack([f.decision_from_cols(kernel_cols) for f in self.fits])
        if self.strategy == "ovo":
            return _vote(decisions, self.pairs, self.n_classes)
        return np.argmax(decisions, axis=0).astype(np.int64)

    def to_model(self, x_train: np.ndarray, kernel: Kernel, c: float, tol: float):
        if self.strategy == "binary":
            return self.fits[0].to_model(x_train, kernel, c, tol)
        models = tuple(f.to_model(x_train, kernel, c, tol) for f in self.fits)
        if self.strategy == "ovo":
            return OvoModel(n_classes=self.n_classes,
                            class_pairs=tuple(self.pairs), models=models)
        return OvaModel(n_classes=self.n_classes, models=models)


def _fit_candidate(g: np.ndarray, labels: np.ndarray, c: float, strategy: str,
                   n_classes: int, tol: float, max_passes: int,
                   max_total_sweeps: int | None) -> _CandidatePredictor:
    fits: list[_BinaryFit] = []
    pairs: list[tuple[int, int]] = []
    if strategy == "binary":
        y = np.where(labels == 1, 1.0, -1.0)
        fits.append(_fit_on_gram(g, y, np.arange(labels.size), c, tol,
                                 max_passes, max_total_sweeps))
    elif strategy == "ovo":
        for a in range(n_classes):
            for b in range(a + 1, n_classes):
                idx = np.flatnonzero((labels == a) | (labels == b))
                y = np.where(labels[idx] == a, 1.0, -1.0)
                fits.append(_fit_on_gram(np.ascontiguousarray(g[np.ix_(idx, idx)]),
                                         y, idx, c, tol, max_passes,
                                         max_total_sweeps))
                pairs.append((a, b))
    elif strategy == "ova":
        indices = np.arange(labels.size)
        for a in range(n_classes):
            y = np.where(labels == a, 1.0, -1.0)
            fits.append(_fit_on_gram(g, y, indices, c, tol, max_passes,
                                     max_total_sweeps))
    else:
        raise InvalidArgumentError(f"unknown multiclass strategy {strategy!r}")
    return _CandidatePredictor(strategy, fits, pairs, n_classes)


def _check_xy(name: str, data) -> tuple[np.ndarray, np.ndarray]:
    try:
        x, labels = data
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{name} must be an (X, labels) pair: {exc}") from exc
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64).ravel()
    if x.ndim != 2 or x.shape[0] == 0:
        raise InvalidArgumentError(f"{name} features must be a non-empty 2-D matrix")
    if labels.shape[0] != x.shape[0]:
        raise InvalidArgumentError(
            f"{name}: {labels.shape[0]} labels for {x.shape[0]} examples"
        )
    return x, labels


def model_select(train, val, test, candidates: Sequence[Candidate] | None = None,
                 multiclass: str = "ovo", tol: float = DEFAULT_TOL,
                 max_passes: int = DEFAULT_MAX_PASSES,
                 max_total_sweeps: int | None = None) -> SelectionReport:
    """Train every candidate on train, pick by validation, score on test.

    ``train``/``val``/``test`` are (X, labels) pairs with integer classes
    0..k-1.  Ties on validation accuracy go to the earlier candidate in the
    canonical order (linear, poly 2..4, RBF, each over the C grid).  Failed
    candidates are recorded with their error and skipped for selection.
    """
    x_train, l_train = _check_xy("train", train)
    x_val, l_val = _check_xy("val", val)
    x_test, l_test = _check_xy("test", test)
    if x_val.shape[1] != x_train.shape[1] or x_test.shape[1] != x_train.shape[1]:
        raise InvalidArgumentError("train/val/test feature dimensions differ")
    _, n_classes = _check_class_labels(l_train)
    for name, lab in (("val", l_val), ("test", l_test)):
        if lab.min() < 0 or lab.max() >= n_classes:
            raise InvalidArgumentError(f"{name} labels outside train's classes")
    strategy = "binary" if n_classes == 2 else multiclass
    if strategy not in ("binary", "ovo", "ova"):
        raise InvalidArgumentError(f"unknown multiclass strategy {multiclass!r}")
    if candidates is None:
        candidates = default_candidates(x_train.shape[1])
    if not candidates:
        raise InvalidArgumentError("need at least one candidate")

    results: list[CandidateResult | None] = [None] * len(candidates)
    predictors: list[_CandidatePredictor | None] = [None] * len(candidates)
    by_kernel: dict[Kernel, list[int]] = {}
    for idx, cand in enumerate(candidates):
        by_kernel.setdefault(cand.kernel, []).append(idx)

    for kernel, indices in by_kernel.items():
        g = k_val = None
        for idx in indices:
            cand = candidates[idx]
            try:
                if g is None:
                    g = gram(x_train, kernel)
                    k_val = kernel_matrix(kernel, x_train, x_val)
                predictor = _fit_candidate(g, l_train, cand.C, strategy, n_classes,
                                           tol, max_passes, max_total_sweeps)
                val_acc = accuracy(predictor.predict_from_cols(k_val), l_val)
                predictors[idx] = predictor
                results[idx] = CandidateResult(
                    name=cand.name, kernel=kernel, C=cand.C,
                    val_accuracy=val_acc, converged=predictor.converged,
                )
            except (InvalidArgumentError, NumericError) as exc:
                results[idx] = CandidateResult(
                    name=cand.name, kernel=kernel, C=cand.C,
                    val_accuracy=None, converged=None, error=str(exc),
                )

    scored = [
        (idx, r.val_accuracy) for idx, r in enumerate(results)
        if r is not None and r.val_accuracy is not None
    ]
    if not scored:
        raise NumericError("every candidate failed to train")
    chosen_index = max(scored, key=lambda item: (item[1], -item[0]))[0]

    chosen = candidates[chosen_index]
    predictor = predictors[chosen_index]
    k_test = kernel_matrix(chosen.kernel, x_train, x_test)
    test_acc = accuracy(predictor.predict_from_cols(k_test), l_test)
    return SelectionReport(
        results=tuple(results),
        chosen_index=chosen_index,
        test_accuracy=test_acc,
        n_classes=n_classes,
        class_strategy=strategy,
        chosen_model=predictor.to_model(x_train, chosen.kernel, chosen.C, tol),
    )


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def save_model(model, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_json_dict(), fh, indent=2)
        fh.write("\n")


def load_model(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: model JSON does not parse: {exc}") from exc
    kind = obj.get("type") if isinstance(obj, dict) else None
    if kind == "binary":
        return SvmModel.from_json_dict(obj)
    if kind == "ovo":
        return OvoModel.from_json_dict(obj)
    if kind == "ova":
        return OvaModel.from_json_dict(obj)
    raise DataFormatError(f"{path}: unknown model type {kind!r}")
