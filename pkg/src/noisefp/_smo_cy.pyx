"""Compiled SMO sweep kernel (preferred lane).

Mirrors ``_smo_py`` operation for operation: same pair selection, same
update formulas in the same evaluation order, so the two lanes produce
bit-identical iterates.  Compiled with -ffp-contract=off to keep the
error-cache update free of fused multiply-adds the numpy lane cannot do.
"""

import numpy as np

from libc.math cimport fabs

IMPLEMENTATION = "cython"

cdef double _MIN_STEP = 1e-12


def _objective(double[:, ::1] G, double[::1] y, double[::1] alpha):
    a = np.asarray(alpha)
    ay = a * np.asarray(y)
    return float(a.sum() - 0.5 * (ay @ np.asarray(G) @ ay))


cdef bint _try_update(double[:, ::1] G, double[::1] y, double C,
                      double[::1] alpha, double[::1] E, double* b,
                      Py_ssize_t i, Py_ssize_t j, Py_ssize_t m) noexcept:
    cdef double ai_old, aj_old, yi, yj, Ei, Ej, L, H, eta, ai, aj
    cdef double b1, b2, new_b, ci, cj, db
    cdef Py_ssize_t k
    if i == j:
        return False
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
        return False
    eta = 2.0 * G[i, j] - G[i, i] - G[j, j]
    if eta >= 0.0:
        return False
    aj = aj_old - yj * (Ei - Ej) / eta
    if aj > H:
        aj = H
    elif aj < L:
        aj = L
    if fabs(aj - aj_old) < _MIN_STEP:
        return False
    ai = ai_old + yi * yj * (aj_old - aj)
    if ai < 0.0:
        ai = 0.0
    elif ai > C:
        ai = C
    b1 = b[0] - Ei - yi * (ai - ai_old) * G[i, i] - yj * (aj - aj_old) * G[i, j]
    b2 = b[0] - Ej - yi * (ai - ai_old) * G[i, j] - yj * (aj - aj_old) * G[j, j]
    if 0.0 < ai < C:
        new_b = b1
    elif 0.0 < aj < C:
        new_b = b2
    else:
        new_b = 0.5 * (b1 + b2)
    ci = yi * (ai - ai_old)
    cj = yj * (aj - aj_old)
    db = new_b - b[0]
    for k in range(m):
        E[k] = E[k] + (ci * G[i, k] + cj * G[j, k] + db)
    alpha[i] = ai
    alpha[j] = aj
    b[0] = new_b
    return True


def smo_sweeps(double[:, ::1] G, double[::1] y, double C, double tol,
               int max_sweeps, double[::1] alpha, double[::1] E, double b,
               trace=None):
    """Run up to ``max_sweeps`` full sweeps in place over (alpha, E).

    Returns (b, sweeps_done, status): status 0 means a sweep found no KKT
    violators, 1 means violators remain but no pair could move (stalled),
    2 means the sweep budget ran out first.
    """
    cdef Py_ssize_t m = y.shape[0]
    cdef Py_ssize_t i, j, j2, k, offset
    cdef int sweeps = 0
    cdef int status = 2
    cdef int changed, violators
    cdef double Ei, r, gap, best
    cdef bint accepted
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
            best = -1.0
            j = 0
            for k in range(m):
                if k == i:
                    continue
                gap = fabs(E[k] - Ei)
                if gap > best:
                    best = gap
                    j = k
            accepted = _try_update(G, y, C, alpha, E, &b, i, j, m)
            if not accepted:
                for offset in range(1, m):
                    j2 = i + offset
                    if j2 >= m:
                        j2 -= m
                    if j2 == j:
                        continue
                    accepted = _try_update(G, y, C, alpha, E, &b, i, j2, m)
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
