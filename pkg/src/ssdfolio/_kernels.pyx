# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; see ``_kernels_py`` for the reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY, isfinite

cnp.import_array()

cdef enum:
    OPTIMAL = 0
    UNBOUNDED = 1
    ITERATION_LIMIT = 2
    AT_LOWER = 0
    AT_UPPER = 1
    BASIC = 2

cdef double TIE = 1e-12


def simplex_iterate(double[:, ::1] tab, double[::1] xb, double[::1] d,
                    cnp.int64_t[::1] basis, cnp.int8_t[::1] state,
                    const double[::1] upper, double opt_tol, double piv_tol,
                    long max_iter, long degen_switch):
    cdef Py_ssize_t m = tab.shape[0]
    cdef Py_ssize_t n = tab.shape[1]
    cdef Py_ssize_t i, j, q, r, leaving
    cdef long it = 0, degen = 0
    cdef double best, score, direction, theta, a, ratio, rmin, ub, step
    cdef double piv, f, dq, entering_value, best_abs
    cdef bint bland
    cdef cnp.int64_t best_basis
    cdef int code = ITERATION_LIMIT

    with nogil:
        while it < max_iter:
            bland = degen >= degen_switch
            q = -1
            best = -1.0
            for j in range(n):
                if state[j] == AT_LOWER:
                    if not (upper[j] > 0.0 and d[j] < -opt_tol):
                        continue
                elif state[j] == AT_UPPER:
                    if not (d[j] > opt_tol):
                        continue
                else:
                    continue
                if bland:
                    q = j
                    break
                score = fabs(d[j])
                if score > best:
                    best = score
                    q = j
            if q < 0:
                code = OPTIMAL
                break
            direction = 1.0 if state[q] == AT_LOWER else -1.0

            theta = upper[q]
            r = -1
            if m > 0:
                rmin = INFINITY
                for i in range(m):
                    a = direction * tab[i, q]
                    if a > piv_tol:
                        ratio = xb[i] / a
                    elif a < -piv_tol:
                        ub = upper[basis[i]]
                        if not isfinite(ub):
                            continue
                        ratio = (ub - xb[i]) / (-a)
                    else:
                        continue
                    if ratio < 0.0:
                        ratio = 0.0
                    if ratio < rmin:
                        rmin = ratio
                if rmin < theta:
                    best_abs = -1.0
                    best_basis = -1
                    for i in range(m):
                        a = direction * tab[i, q]
                        if a > piv_tol:
                            ratio = xb[i] / a
                        elif a < -piv_tol:
                            ub = upper[basis[i]]
                            if not isfinite(ub):
                                continue
                            ratio = (ub - xb[i]) / (-a)
                        else:
                            continue
                        if ratio < 0.0:
                            ratio = 0.0
                        if ratio <= rmin + TIE:
                            if bland:
                                if r < 0 or basis[i] < best_basis:
                                    best_basis = basis[i]
                                    r = i
                            elif fabs(a) > best_abs:
                                best_abs = fabs(a)
                                r = i
                    theta = rmin
            if not isfinite(theta):
                code = UNBOUNDED
                break

            step = theta * direction
            for i in range(m):
                xb[i] -= step * tab[i, q]
            if r < 0:
                state[q] = AT_UPPER if state[q] == AT_LOWER else AT_LOWER
            else:
                leaving = basis[r]
                state[leaving] = AT_LOWER if direction * tab[r, q] > 0.0 else AT_UPPER
                entering_value = (0.0 if state[q] == AT_LOWER else upper[q]) + step
                piv = tab[r, q]
                for j in range(n):
                    tab[r, j] = tab[r, j] / piv
                for i in range(m):
                    if i == r:
                        continue
                    f = tab[i, q]
                    if f != 0.0:
                        for j in range(n):
                            tab[i, j] -= f * tab[r, j]
                    tab[i, q] = 0.0
                tab[r, q] = 1.0
                dq = d[q]
                for j in range(n):
                    d[j] -= dq * tab[r, j]
                d[q] = 0.0
                xb[r] = entering_value
                basis[r] = q
                state[q] = BASIC
            if theta <= TIE:
                degen += 1
            else:
                degen = 0
            it += 1
    return code, it


def lpm_profile(const double[::1] portfolio_returns, const double[::1] levels, const double[::1] probs):
    cdef Py_ssize_t K = levels.shape[0]
    cdef Py_ssize_t T = portfolio_returns.shape[0]
    cdef Py_ssize_t k, t
    cdef double s, gap
    out = np.empty(K, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for k in range(K):
            s = 0.0
            for t in range(T):
                gap = levels[k] - portfolio_returns[t]
                if gap > 0.0:
                    s += probs[t] * gap
            o[k] = s
    return out


cdef struct GridState:
    Py_ssize_t T
    Py_ssize_t K
    Py_ssize_t nact
    long units
    long cap
    double tol
    double best
    bint found
    const double* returns      # nact x T, rows are active assets
    const double* coef         # nact
    const double* probs        # T
    const double* levels       # K
    const double* targets      # K
    double* partial      # (nact + 1) x T running portfolio returns
    cnp.int64_t* counts       # nact
    cnp.int64_t* best_counts  # nact


cdef bint _feasible(GridState* g, const double* port) noexcept nogil:
    cdef Py_ssize_t k, t
    cdef double s, gap
    for k in range(g.K):
        s = 0.0
        for t in range(g.T):
            gap = g.levels[k] - port[t]
            if gap > 0.0:
                s += g.probs[t] * gap
        if s > g.targets[k] + g.tol:
            return False
    return True


cdef void _walk(GridState* g, Py_ssize_t level, long remaining, double value) noexcept nogil:
    cdef long c, hi
    cdef Py_ssize_t t, j
    cdef double w, v
    cdef double* src = g.partial + level * g.T
    cdef double* dst = g.partial + (level + 1) * g.T
    cdef const double* row = g.returns + level * g.T
    if level == g.nact - 1:
        if remaining > g.cap:
            return
        c = remaining
        w = <double>c / <double>g.units
        v = value + w * g.coef[level]
        if g.found and not (v > g.best):
            return
        for t in range(g.T):
            dst[t] = src[t] + w * row[t]
        if _feasible(g, dst):
            g.counts[level] = c
            g.found = True
            g.best = v
            for j in range(g.nact):
                g.best_counts[j] = g.counts[j]
        return
    hi = remaining if remaining < g.cap else g.cap
    for c in range(0, hi + 1):
        # the remaining assets must be able to absorb what is left
        if remaining - c > g.cap * (g.nact - 1 - level):
            continue
        w = <double>c / <double>g.units
        for t in range(g.T):
            dst[t] = src[t] + w * row[t]
        g.counts[level] = c
        _walk(g, level + 1, remaining - c, value + w * g.coef[level])


def grid_best(const double[:, ::1] returns, const double[::1] probs, const double[::1] benchmark,
              const double[::1] targets, const double[::1] coef, long units, long cap,
              active, double tol):
    cdef Py_ssize_t T = returns.shape[0]
    cdef Py_ssize_t n = returns.shape[1]
    idx = np.flatnonzero(np.asarray(active, dtype=bool))
    cdef Py_ssize_t nact = len(idx)
    full = np.zeros(n, dtype=np.int64)
    if nact == 0 or units > cap * nact:
        return False, -np.inf, full
    sub = np.ascontiguousarray(np.asarray(returns)[:, idx].T)
    sub_coef = np.ascontiguousarray(np.asarray(coef)[idx])
    partial = np.zeros((nact + 1, T), dtype=np.float64)
    counts = np.zeros(nact, dtype=np.int64)
    best_counts = np.zeros(nact, dtype=np.int64)
    lv = np.ascontiguousarray(benchmark, dtype=np.float64)
    tg = np.ascontiguousarray(targets, dtype=np.float64)
    pr = np.ascontiguousarray(probs, dtype=np.float64)
    cdef const double[:, ::1] sub_v = sub
    cdef const double[::1] coef_v = sub_coef
    cdef double[:, ::1] part_v = partial
    cdef cnp.int64_t[::1] cnt_v = counts
    cdef cnp.int64_t[::1] best_v = best_counts
    cdef const double[::1] lv_v = lv
    cdef const double[::1] tg_v = tg
    cdef const double[::1] pr_v = pr
    cdef GridState g
    g.T = T
    g.K = lv.shape[0]
    g.nact = nact
    g.units = units
    g.cap = cap
    g.tol = tol
    g.best = -INFINITY
    g.found = False
    g.returns = &sub_v[0, 0]
    g.coef = &coef_v[0]
    g.probs = &pr_v[0]
    g.levels = &lv_v[0]
    g.targets = &tg_v[0]
    g.partial = &part_v[0, 0]
    g.counts = &cnt_v[0]
    g.best_counts = &best_v[0]
    with nogil:
        _walk(&g, 0, units, 0.0)
    if g.found:
        full[idx] = best_counts
    return bool(g.found), float(g.best), full
