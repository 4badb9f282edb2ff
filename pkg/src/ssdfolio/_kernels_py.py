"""Pure-Python (numpy) implementations of the hot kernels.

These mirror ``_kernels.pyx`` operation for operation and are used when the
compiled extension is unavailable.
"""

from functools import lru_cache

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2

AT_LOWER = 0
AT_UPPER = 1
BASIC = 2

_TIE = 1e-12


def simplex_iterate(tab, xb, d, basis, state, upper, opt_tol, piv_tol, max_iter, degen_switch):
    """Run bounded-variable primal simplex pivots on a dense tableau, in place.

    Minimizes; ``d`` holds reduced costs. Nonbasic variables sit at 0 or at
    ``upper``; basic values live in ``xb``. Returns ``(code, iterations)``.
    """
    m = tab.shape[0]
    degen = 0
    it = 0
    while it < max_iter:
        up = (state == AT_LOWER) & (upper > 0.0) & (d < -opt_tol)
        down = (state == AT_UPPER) & (d > opt_tol)
        cand = up | down
        if not cand.any():
            return OPTIMAL, it
        bland = degen >= degen_switch
        if bland:
            q = int(np.flatnonzero(cand)[0])
        else:
            q = int(np.argmax(np.where(cand, np.abs(d), -1.0)))
        direction = 1.0 if state[q] == AT_LOWER else -1.0

        theta = upper[q]
        r = -1
        if m:
            alpha = direction * tab[:, q]
            ub = upper[basis]
            ratios = np.full(m, np.inf)
            pos = alpha > piv_tol
            ratios[pos] = xb[pos] / alpha[pos]
            neg = (alpha < -piv_tol) & np.isfinite(ub)
            ratios[neg] = (ub[neg] - xb[neg]) / (-alpha[neg])
            np.maximum(ratios, 0.0, out=ratios)
            rmin = ratios.min()
            if rmin < theta:
                ties = np.flatnonzero(ratios <= rmin + _TIE)
                if bland:
                    r = int(ties[np.argmin(basis[ties])])
                else:
                    r = int(ties[np.argmax(np.abs(alpha[ties]))])
                theta = rmin
        if not np.isfinite(theta):
            return UNBOUNDED, it

        step = theta * direction
        if m:
            xb -= step * tab[:, q]
        if r < 0:
            state[q] = AT_UPPER if state[q] == AT_LOWER else AT_LOWER
        else:
            leaving = basis[r]
            state[leaving] = AT_LOWER if direction * tab[r, q] > 0.0 else AT_UPPER
            entering_value = (0.0 if state[q] == AT_LOWER else upper[q]) + step
            pivot_row = tab[r] / tab[r, q]
            col = tab[:, q].copy()
            col[r] = 0.0
            tab -= np.outer(col, pivot_row)
            tab[r] = pivot_row
            tab[:, q] = 0.0
            tab[r, q] = 1.0
            d -= d[q] * pivot_row
            d[q] = 0.0
            xb[r] = entering_value
            basis[r] = q
            state[q] = BASIC
        degen = degen + 1 if theta <= _TIE else 0
        it += 1
    return ITERATION_LIMIT, it


def lpm_profile(portfolio_returns, levels, probs):
    """Expected shortfall below each level: sum_t p_t * max(level_k - R_t, 0)."""
    short = np.maximum(levels[:, None] - portfolio_returns[None, :], 0.0)
    return short @ probs


def _compositions(k, total, cap):
    """All k-part compositions of ``total`` with parts in [0, cap], lexicographic."""
    if k <= 4:
        return _small_compositions(k, total, cap)
    blocks = []
    for first in range(0, min(cap, total) + 1):
        rest = _compositions(k - 1, total - first, cap)
        if len(rest):
            blocks.append(np.hstack([np.full((len(rest), 1), first, dtype=np.int64), rest]))
    if not blocks:
        return np.empty((0, k), dtype=np.int64)
    return np.vstack(blocks)


@lru_cache(maxsize=None)
def _small_compositions(k, total, cap):
    if k == 1:
        if 0 <= total <= cap:
            return np.array([[total]], dtype=np.int64)
        return np.empty((0, 1), dtype=np.int64)
    blocks = []
    for first in range(0, min(cap, total) + 1):
        rest = _small_compositions(k - 1, total - first, cap)
        if len(rest):
            head = np.full((len(rest), 1), first, dtype=np.int64)
            blocks.append(np.hstack([head, rest]))
    if not blocks:
        return np.empty((0, k), dtype=np.int64)
    return np.vstack(blocks)


def grid_best(returns, probs, benchmark, targets, coef, units, cap, active, tol, chunk=8192):
    """Best objective over SSD-feasible points of the capped simplex grid.

    Grid weights are ``counts / units`` with each count in ``[0, cap]`` and
    inactive assets pinned at zero. Points are visited in blocks sharing the
    first active count; only points beating the incumbent are checked for
    feasibility. Among equal values the lexicographically first point wins.
    Returns ``(found, best_value, counts)``.
    """
    n = returns.shape[1]
    idx = np.flatnonzero(active)
    nact = len(idx)
    full = np.zeros(n, dtype=np.int64)
    if nact == 0 or units > cap * nact:
        return False, -np.inf, full
    sub = returns[:, idx]
    sub_coef = coef[idx]
    found, best, best_counts = False, -np.inf, None
    for first in range(0, min(cap, units) + 1):
        if nact == 1:
            if first != units:
                continue
            block = np.array([[first]], dtype=np.int64)
        else:
            rest = _compositions(nact - 1, units - first, cap)
            if not len(rest):
                continue
            block = np.hstack([np.full((len(rest), 1), first, dtype=np.int64), rest])
        weights = block / float(units)
        values = weights @ sub_coef
        cand = np.flatnonzero(values > best) if found else np.arange(len(values))
        if not cand.size:
            continue
        order = cand[np.argsort(-values[cand], kind="stable")]
        for start in range(0, len(order), chunk):
            pick = order[start:start + chunk]
            port = weights[pick] @ sub.T  # points x T
            short = np.maximum(benchmark[None, :, None] - port[:, None, :], 0.0)
            lpm = short @ probs  # points x K
            ok = np.all(lpm <= targets[None, :] + tol, axis=1)
            if ok.any():
                hit = pick[int(np.argmax(ok))]
                found, best, best_counts = True, float(values[hit]), block[hit]
                break
    if found:
        full[idx] = best_counts
    return found, best, full
