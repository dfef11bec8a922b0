"""SMO driver and solver-lane selection.

The sweep kernel has two interchangeable implementations: a compiled Cython
extension and a pure-numpy fallback.  The compiled lane is preferred when
importable; setting NOISEFP_PURE_PYTHON=1 forces the fallback.  Both produce
bit-identical iterates, so the choice never changes results, only speed.

The driver owns everything around the sweeps: initialization, the final
bias recentering from free support vectors, and the convergence verdict.
"""

import os

import numpy as np

from .errors import InvalidArgumentError


def _pick_lane():
    if os.environ.get("NOISEFP_PURE_PYTHON", "").strip() not in ("", "0"):
        from . import _smo_py

        return _smo_py
    try:
        from . import _smo_cy

        return _smo_cy
    except ImportError:
        from . import _smo_py

        return _smo_py


_lane = _pick_lane()
IMPLEMENTATION = _lane.IMPLEMENTATION
smo_sweeps = _lane.smo_sweeps


def dual_objective(G: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    """sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j G_ij."""
    ay = alpha * y
    return float(alpha.sum() - 0.5 * (ay @ G @ ay))


def has_violators(E: np.ndarray, y: np.ndarray, alpha: np.ndarray, C: float,
                  tol: float) -> bool:
    r = E * y
    return bool(np.any(((r < -tol) & (alpha < C)) | ((r > tol) & (alpha > 0.0))))


def kkt_violation(G: np.ndarray, y: np.ndarray, alpha: np.ndarray, b: float,
                  C: float) -> float:
    """Worst KKT residual of a dual iterate, recomputed from scratch.

    Measures how far each margin y_i f(x_i) strays from its allowed region:
    alpha=0 needs margin >= 1, free alphas need margin == 1, alpha=C needs
    margin <= 1.  Zero means exact KKT optimality.
    """
    margins = y * ((alpha * y) @ G + b)
    worst = 0.0
    at_zero = alpha <= 0.0
    at_c = alpha >= C
    free = ~(at_zero | at_c)
    if at_zero.any():
        worst = max(worst, float(np.max(1.0 - margins[at_zero], initial=0.0)))
    if at_c.any():
        worst = max(worst, float(np.max(margins[at_c] - 1.0, initial=0.0)))
    if free.any():
        worst = max(worst, float(np.max(np.abs(margins[free] - 1.0))))
    return worst


def _rebias(G, y, alpha, E, b, C):
    """Recenter b as the mean residual over free support vectors.

    E is shifted in place by the same amount so the cache stays consistent.
    With no free vectors (every alpha at a bound) b is left as the sweep
    kernel's running estimate.
    """
    free = (alpha > 0.0) & (alpha < C)
    if not free.any():
        return b
    ay = alpha * y
    b_new = float(np.mean(y[free] - ay @ G[:, free]))
    if b_new != b:
        E += b_new - b
    return b_new


def solve(G: np.ndarray, y: np.ndarray, C: float, tol: float = 1e-3,
          max_passes: int = 100, max_total_sweeps: int | None = None,
          trace: list | None = None):
    """Maximize the box-constrained SVM dual on a precomputed Gram matrix.

    Returns (alpha, b, sweeps, converged).  ``converged`` is True only if a
    full sweep found no KKT violators at tolerance ``tol``, including after
    the free-vector bias recentering.

    ``max_passes`` bounds consecutive sweeps without progress, the classic
    stopping rule.  Pair selection here is deterministic, so one
    progress-free sweep is already a fixed point of the whole budget: it
    ends the run immediately, flagged non-converged if violators remain.
    ``max_total_sweeps`` (default 1000 * max_passes) is a safety valve on
    total sweeps for slow-crawling overlap-heavy problems.
    """
    G = np.ascontiguousarray(G, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    m = y.shape[0]
    if G.shape != (m, m):
        raise InvalidArgumentError(f"Gram shape {G.shape} does not match {m} labels")
    if m < 2:
        raise InvalidArgumentError(f"need at least 2 examples, got {m}")
    if not np.all(np.abs(y) == 1.0):
        raise InvalidArgumentError("labels must be exactly +1 or -1")
    if not (np.isfinite(C) and C > 0):
        raise InvalidArgumentError(f"C must be positive and finite, got {C}")
    if not (np.isfinite(tol) and tol > 0):
        raise InvalidArgumentError(f"tol must be positive, got {tol}")
    if max_passes < 1:
        raise InvalidArgumentError(f"max_passes must be >= 1, got {max_passes}")
    if max_total_sweeps is None:
        max_total_sweeps = 1000 * max_passes
    if max_total_sweeps < 1:
        raise InvalidArgumentError(f"max_total_sweeps must be >= 1, got {max_total_sweeps}")
    if not np.all(np.isfinite(G)):
        raise InvalidArgumentError("Gram matrix contains non-finite entries")

    alpha = np.zeros(m, dtype=np.float64)
    E = -y.copy()  # f = 0 at the start, so E_i = f(x_i) - y_i = -y_i
    b = 0.0
    total = 0
    converged = False
    while total < max_total_sweeps:
        b, done, status = smo_sweeps(
            G, y, C, tol, max_total_sweeps - total, alpha, E, b, trace
        )
        total += done
        if status == 2:
            break  # valve closed while still progressing
        if status == 1:
            break  # fixed point with violators left: non-convergence
        b = _rebias(G, y, alpha, E, b, C)
        if not has_violators(E, y, alpha, C, tol):
            converged = True
            break
        # Recentering exposed new violators: keep sweeping within the valve.
    if not converged:
        b = _rebias(G, y, alpha, E, b, C)
    return alpha, b, total, converged
