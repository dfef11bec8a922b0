"""Pure-numpy SMO sweep kernel (fallback lane).

One sweep visits every index i in order; if i violates the KKT conditions at
tolerance ``tol`` it is paired with the index maximizing |E_i - E_j| and the
pair is jointly optimized in closed form.  If that pair cannot move, a
deterministic wrap-around scan tries the remaining partners.  The compiled
lane in ``_smo_cy`` mirrors this file operation for operation so both lanes
produce bit-identical iterates.
"""

import numpy as np

IMPLEMENTATION = "python"

_MIN_STEP = 1e-12


def _objective(G, y, alpha):
    ay = alpha * y
    return float(alpha.sum() - 0.5 * (ay @ G @ ay))


def _try_update(G, y, C, alpha, E, b, i, j):
    """Jointly optimize (alpha_i, alpha_j); returns (accepted, new_b)."""
    if i == j:
        return False, b
    ai_old = alpha[i]
    aj_old = alpha[j]
    yi = y[i]
    yj = y[j]
    Ei = E[i]
    Ej = E[j]
    if yi != yj:
        L = max(0.0, aj_old - ai_old)
        H = min(C, C + aj_old - ai_old)
    else:
        L = max(0.0, ai_old + aj_old - C)
        H = min(C, ai_old + aj_old)
    if L >= H:
        return False, b
    eta = 2.0 * G[i, j] - G[i, i] - G[j, j]
    if eta >= 0.0:
        return False, b
    aj = aj_old - yj * (Ei - Ej) / eta
    if aj > H:
        aj = H
    elif aj < L:
        aj = L
    if abs(aj - aj_old) < _MIN_STEP:
        return False, b
    ai = ai_old + yi * yj * (aj_old - aj)
    if ai < 0.0:
        ai = 0.0
    elif ai > C:
        ai = C
    b1 = b - Ei - yi * (ai - ai_old) * G[i, i] - yj * (aj - aj_old) * G[i, j]
    b2 = b - Ej - yi * (ai - ai_old) * G[i, j] - yj * (aj - aj_old) * G[j, j]
    if 0.0 < ai < C:
        new_b = b1
    elif 0.0 < aj < C:
        new_b = b2
    else:
        new_b = 0.5 * (b1 + b2)
    ci = yi * (ai - ai_old)
    cj = yj * (aj - aj_old)
    E += ci * G[i] + cj * G[j] + (new_b - b)
    alpha[i] = ai
    alpha[j] = aj
    return True, new_b


def smo_sweeps(G, y, C, tol, max_sweeps, alpha, E, b, trace=None):
    """Run up to ``max_sweeps`` full sweeps in place over (alpha, E).

    Returns (b, sweeps_done, status): status 0 means a sweep found no KKT
    violators, 1 means violators remain but no pair could move (stalled),
    2 means the sweep budget ran out first.
    """
    m = y.shape[0]
    sweeps = 0
    status = 2
    while sweeps < max_sweeps:
        sweeps += 1
        changed = 0
        violators = 0
        for i in range(m):
            Ei = E[i]
            r = Ei * y[i]
            if not ((r < -tol and alpha[i] < C) or (r > tol and alpha[i] > 0.0)):
                continue
            violators += 1
            gap = np.abs(E - Ei)
            gap[i] = -1.0
            j = int(np.argmax(gap))
            accepted, b = _try_update(G, y, C, alpha, E, b, i, j)
            if not accepted:
                for offset in range(1, m):
                    j2 = i + offset
                    if j2 >= m:
                        j2 -= m
                    if j2 == j:
                        continue
                    accepted, b = _try_update(G, y, C, alpha, E, b, i, j2)
                    if accepted:
                        break
            if accepted:
                changed += 1
                if trace is not None:
                    trace.append(_objective(G, y, alpha))
        if violators == 0:
            status = 0
            break
        if changed == 0:
            status = 1
            break
    return b, sweeps, status
