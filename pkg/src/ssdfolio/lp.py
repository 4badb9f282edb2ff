"""Dense linear and convex quadratic programming.

``solve_lp`` is a two-phase bounded-variable primal simplex on a dense
tableau (Dantzig pricing, Bland's rule after a run of degenerate pivots).
``solve_qp`` is a primal active-set method for convex quadratics, started
from a feasible vertex found by the LP phase 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Optional

import numpy as np

from . import kernels
from .tolerances import DEFAULT


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"


def _matrix(a, ncols):
    if a is None:
        return np.zeros((0, ncols))
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return np.zeros((0, ncols))
    return a


def _vector(v, n, fill):
    if v is None:
        return np.full(n, fill, dtype=float)
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size == 1 and n != 1:
        return np.full(n, float(v[0]))
    return v.copy()


def _check_rows(name, A, b, n):
    if A.shape[1] != n:
        raise ValueError(f"{name} has {A.shape[1]} columns, expected {n}")
    if A.shape[0] != b.shape[0]:
        raise ValueError(f"{name} has {A.shape[0]} rows but rhs has {b.shape[0]} entries")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValueError(f"{name} coefficients must be finite")


@dataclass
class LinearProgram:
    """maximize c'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lo <= x <= hi."""

    c: np.ndarray
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        if not np.all(np.isfinite(self.c)):
            raise ValueError("objective coefficients must be finite")
        self.A_ub = _matrix(self.A_ub, n)
        self.b_ub = _vector(self.b_ub, self.A_ub.shape[0], 0.0) if self.b_ub is not None else np.zeros(self.A_ub.shape[0])
        self.A_eq = _matrix(self.A_eq, n)
        self.b_eq = _vector(self.b_eq, self.A_eq.shape[0], 0.0) if self.b_eq is not None else np.zeros(self.A_eq.shape[0])
        self.lo = _vector(self.lo, n, 0.0)
        self.hi = _vector(self.hi, n, np.inf)
        _check_rows("A_ub", self.A_ub, self.b_ub, n)
        _check_rows("A_eq", self.A_eq, self.b_eq, n)
        if self.lo.size != n or self.hi.size != n:
            raise ValueError("bounds must have one entry per variable")
        if np.any(np.isnan(self.lo)) or np.any(np.isnan(self.hi)) or np.any(self.lo > self.hi):
            raise ValueError("bounds must satisfy lo <= hi")
        if np.any(self.lo == np.inf) or np.any(self.hi == -np.inf):
            raise ValueError("bounds admit no value")

    @property
    def n(self) -> int:
        return self.c.size

    def violation(self, x) -> float:
        """Largest absolute constraint or bound violation at ``x``."""
        x = np.asarray(x, dtype=float)
        parts = [0.0]
        if self.A_ub.shape[0]:
            parts.append(float(np.max(self.A_ub @ x - self.b_ub)))
        if self.A_eq.shape[0]:
            parts.append(float(np.max(np.abs(self.A_eq @ x - self.b_eq))))
        parts.append(float(np.max(self.lo - x, initial=0.0)))
        parts.append(float(np.max(x - self.hi, initial=0.0)))
        return max(parts)


@dataclass(frozen=True)
class Basis:
    """Final simplex basis in the solver's internal (standardized) space."""

    rows: tuple
    cols: tuple
    state: bytes


@dataclass
class SolveResult:
    status: Status
    x: Optional[np.ndarray]
    objective: float
    iterations: int = 0
    max_violation: float = float("nan")
    duals_ub: Optional[np.ndarray] = None
    duals_eq: Optional[np.ndarray] = None
    basis: Optional[Basis] = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status is Status.OPTIMAL


@dataclass
class _Standard:
    """min cost'y  s.t.  M y = rhs,  0 <= y <= upper  (y = structural + slacks)."""

    M: np.ndarray
    rhs: np.ndarray
    cost: np.ndarray
    upper: np.ndarray
    n_struct: int
    shift: np.ndarray
    transform: np.ndarray  # x = shift + transform @ y[:n_struct]
    const: float
    m_ub: int


def _standardize(lp: LinearProgram) -> _Standard:
    n = lp.n
    cols = []
    upper = []
    shift = np.zeros(n)
    for j in range(n):
        lo, hi = lp.lo[j], lp.hi[j]
        if np.isfinite(lo):
            shift[j] = lo
            cols.append((j, 1.0))
            upper.append(hi - lo)
        elif np.isfinite(hi):
            shift[j] = hi
            cols.append((j, -1.0))
            upper.append(np.inf)
        else:
            cols.append((j, 1.0))
            upper.append(np.inf)
            cols.append((j, -1.0))
            upper.append(np.inf)
    ns = len(cols)
    transform = np.zeros((n, ns))
    for k, (j, s) in enumerate(cols):
        transform[j, k] = s
    m_ub, m_eq = lp.A_ub.shape[0], lp.A_eq.shape[0]
    m = m_ub + m_eq
    M = np.zeros((m, ns + m_ub))
    M[:m_ub, :ns] = lp.A_ub @ transform
    M[m_ub:, :ns] = lp.A_eq @ transform
    M[:m_ub, ns:] = np.eye(m_ub)
    rhs = np.concatenate([lp.b_ub - lp.A_ub @ shift, lp.b_eq - lp.A_eq @ shift])
    cost = np.zeros(ns + m_ub)
    cost[:ns] = -(transform.T @ lp.c)
    return _Standard(
        M=M,
        rhs=rhs,
        cost=cost,
        upper=np.concatenate([np.asarray(upper, dtype=float), np.full(m_ub, np.inf)]),
        n_struct=ns,
        shift=shift,
        transform=transform,
        const=float(lp.c @ shift),
        m_ub=m_ub,
    )


def _values(state, xb, basis, upper):
    y = np.where(state == kernels.AT_UPPER, upper, 0.0)
    y = np.where(np.isfinite(y), y, 0.0)
    y[basis] = xb
    return y


def _reduced_costs(cost, tab, basis):
    d = cost - cost[basis] @ tab
    d[basis] = 0.0
    return d


def _run(tab, xb, d, basis, state, upper, tol, max_iter):
    code, its = kernels.simplex_iterate(
        tab, xb, d, basis, state, upper, tol, DEFAULT.pivot, int(max_iter), DEFAULT.degenerate_switch
    )
    return code, its


def _phase1(std: _Standard, tol, max_iter):
    m, n = std.M.shape
    M = std.M.copy()
    rhs = std.rhs.copy()
    flip = np.ones(m)
    basis = np.empty(m, dtype=np.int64)
    art_rows = []
    for i in range(m):
        if i < std.m_ub and rhs[i] >= 0.0:
            basis[i] = std.n_struct + i
        else:
            if rhs[i] < 0.0:
                M[i] *= -1.0
                rhs[i] = -rhs[i]
                flip[i] = -1.0
            art_rows.append(i)
    na = len(art_rows)
    tab = np.zeros((m, n + na))
    tab[:, :n] = M
    for k, i in enumerate(art_rows):
        tab[i, n + k] = 1.0
        basis[i] = n + k
    upper = np.concatenate([std.upper, np.full(na, np.inf)])
    state = np.zeros(n + na, dtype=np.int8)
    state[basis] = kernels.BASIC
    xb = rhs.copy()
    its = 0
    if na:
        cost = np.zeros(n + na)
        cost[n:] = 1.0
        d = _reduced_costs(cost, tab, basis)
        code, its = _run(tab, xb, d, basis, state, upper, tol, max_iter)
        if code == kernels.ITERATION_LIMIT:
            return None, its, Status.ITERATION_LIMIT
        infeas = float(np.sum(xb[basis >= n]))
        if infeas > tol * max(1.0, float(np.max(np.abs(rhs), initial=0.0))) * 10:
            return None, its, Status.INFEASIBLE
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if basis[r] < n:
            continue
        row = np.abs(tab[r, :n])
        row[state[:n] == kernels.BASIC] = 0.0
        j = int(np.argmax(row)) if n else -1
        if j < 0 or row[j] <= 1e-9:
            keep[r] = False
            continue
        theta = xb[r] / tab[r, j]
        xb -= theta * tab[:, j]
        start = upper[j] if state[j] == kernels.AT_UPPER else 0.0
        pivot_row = tab[r] / tab[r, j]
        col = tab[:, j].copy()
        col[r] = 0.0
        tab -= np.outer(col, pivot_row)
        tab[r] = pivot_row
        state[basis[r]] = kernels.AT_LOWER
        basis[r] = j
        state[j] = kernels.BASIC
        xb[r] = start + theta
    tab = np.ascontiguousarray(tab[keep][:, :n])
    return (tab, xb[keep].copy(), basis[keep].copy(), state[:n].copy(), keep, flip), its, Status.OPTIMAL


def _warm(std: _Standard, warm: Basis, tol):
    m, n = std.M.shape
    rows = np.asarray(warm.rows, dtype=bool)
    if rows.size != m or len(warm.state) != n:
        return None
    basis = np.asarray(warm.cols, dtype=np.int64)
    state = np.frombuffer(warm.state, dtype=np.int8).copy()
    if basis.size != int(rows.sum()):
        return None
    M = std.M[rows]
    B = M[:, basis]
    try:
        tab = np.linalg.solve(B, M)
    except np.linalg.LinAlgError:
        return None
    y = _values(state, np.zeros(basis.size), basis, std.upper)
    y[basis] = 0.0
    xb = np.linalg.solve(B, std.rhs[rows] - M @ y)
    ub = std.upper[basis]
    if np.any(xb < -tol * 10) or np.any(xb > ub + tol * 10):
        return None
    return np.ascontiguousarray(tab), xb, basis, state, rows, np.ones(m)


def solve_lp(lp: LinearProgram, tol: float = DEFAULT.lp, max_iter: Optional[int] = None,
             warm_start: Optional[Basis] = None) -> SolveResult:
    """Maximize ``lp.c @ x`` over the polyhedron described by ``lp``."""
    std = _standardize(lp)
    m, n = std.M.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    start = _warm(std, warm_start, tol) if warm_start is not None else None
    its1 = 0
    if start is None:
        start, its1, status = _phase1(std, tol, max_iter)
        if start is None:
            return SolveResult(status, None, float("nan"), iterations=its1)
    tab, xb, basis, state, keep, flip = start
    d = _reduced_costs(std.cost, tab, basis)
    code, its2 = _run(tab, xb, d, basis, state, std.upper, tol, max_iter - its1)
    its = its1 + its2
    if code == kernels.UNBOUNDED:
        return SolveResult(Status.UNBOUNDED, None, float("inf"), iterations=its)
    if code == kernels.ITERATION_LIMIT:
        return SolveResult(Status.ITERATION_LIMIT, None, float("nan"), iterations=its)

    M = std.M[keep]
    rhs = std.rhs[keep]
    y = _values(state, xb, basis, std.upper)
    B = M[:, basis]
    try:
        # refine basic values against the original rows
        nonbasic = y.copy()
        nonbasic[basis] = 0.0
        y[basis] = np.linalg.solve(B, rhs - M @ nonbasic)
        duals = np.linalg.solve(B.T, std.cost[basis])
    except np.linalg.LinAlgError:
        duals = None
    x = std.shift + std.transform @ y[: std.n_struct]
    duals_ub = duals_eq = None
    if duals is not None:
        full = np.zeros(m)
        full[keep] = duals
        pi = -full
        duals_ub, duals_eq = pi[: std.m_ub], pi[std.m_ub:]
    basis_rec = Basis(tuple(bool(k) for k in keep), tuple(int(b) for b in basis), state.tobytes())
    return SolveResult(
        Status.OPTIMAL,
        x,
        float(lp.c @ x),
        iterations=its,
        max_violation=lp.violation(x),
        duals_ub=duals_ub,
        duals_eq=duals_eq,
        basis=basis_rec,
    )


def _mps_number(v: float) -> str:
    for digits in range(12, 0, -1):
        s = f"{v:.{digits}g}"
        if len(s) <= 12:
            return s
    return f"{v:.1e}"


def write_mps(lp: LinearProgram, out: IO[str], name: str = "SSDLP") -> None:
    """Dump ``lp`` in fixed MPS format (objective negated: MPS minimizes)."""

    def line(f1="", f2="", f3="", f4="", f5="", f6=""):
        s = f" {f1:<2} {f2:<8}  {f3:<8}  {f4:>12}"
        if f5:
            s += f"   {f5:<8}  {f6:>12}"
        out.write(s.rstrip() + "\n")

    n = lp.n
    rows = [("L", f"U{i + 1}", lp.A_ub[i], lp.b_ub[i]) for i in range(lp.A_ub.shape[0])]
    rows += [("E", f"E{i + 1}", lp.A_eq[i], lp.b_eq[i]) for i in range(lp.A_eq.shape[0])]
    out.write(f"NAME          {name[:8]}\n")
    out.write("* objective row holds -c: original problem maximizes c'x\n")
    out.write("ROWS\n")
    out.write(" N  OBJ\n")
    for kind, rname, _, _ in rows:
        out.write(f" {kind}  {rname}\n")
    out.write("COLUMNS\n")
    for j in range(n):
        cname = f"X{j + 1}"
        if lp.c[j] != 0.0:
            line("", cname, "OBJ", _mps_number(-lp.c[j]))
        for _, rname, coef, _ in rows:
            if coef[j] != 0.0:
                line("", cname, rname, _mps_number(coef[j]))
    out.write("RHS\n")
    for _, rname, _, b in rows:
        if b != 0.0:
            line("", "RHS", rname, _mps_number(b))
    out.write("BOUNDS\n")
    for j in range(n):
        cname = f"X{j + 1}"
        lo, hi = lp.lo[j], lp.hi[j]
        if lo == hi:
            line("FX", "BND", cname, _mps_number(lo))
            continue
        if not np.isfinite(lo) and not np.isfinite(hi):
            line("FR", "BND", cname)
            continue
        if not np.isfinite(lo):
            line("MI", "BND", cname)
        elif lo != 0.0:
            line("LO", "BND", cname, _mps_number(lo))
        if np.isfinite(hi):
            line("UP", "BND", cname, _mps_number(hi))
    out.write("ENDATA\n")


# ---------------------------------------------------------------- quadratic


@dataclass
class QuadraticProgram:
    """minimize x'Qx + q'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lo <= x <= hi."""

    Q: np.ndarray
    q: Optional[np.ndarray] = None
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None
    clamped: bool = field(default=False, init=False)

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        n = Q.shape[0]
        if Q.shape != (n, n):
            raise ValueError("Q must be square")
        if np.max(np.abs(Q - Q.T), initial=0.0) > 1e-10:
            raise ValueError("Q must be symmetric")
        Q = 0.5 * (Q + Q.T)
        w, V = np.linalg.eigh(Q)
        if w.size and w[0] < -1e-8:
            raise ValueError(f"Q is not positive semidefinite (min eigenvalue {w[0]:.3g})")
        if w.size and w[0] < 0.0:
            Q = (V * np.maximum(w, 0.0)) @ V.T
            Q = 0.5 * (Q + Q.T)
            self.clamped = True
        self.Q = Q
        # reuse the LP validation for the constraint data
        shell = LinearProgram(np.zeros(n), self.A_ub, self.b_ub, self.A_eq, self.b_eq, self.lo, self.hi)
        self.q = np.zeros(n) if self.q is None else np.asarray(self.q, dtype=float).reshape(-1)
        self.A_ub, self.b_ub, self.A_eq, self.b_eq = shell.A_ub, shell.b_ub, shell.A_eq, shell.b_eq
        self.lo, self.hi = shell.lo, shell.hi

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.Q @ x + self.q @ x)

    def feasibility_lp(self) -> LinearProgram:
        return LinearProgram(np.zeros(self.n), self.A_ub, self.b_ub, self.A_eq, self.b_eq, self.lo, self.hi)


def _bound_conflict(qp: QuadraticProgram) -> Optional[str]:
    for i, (a, b) in enumerate(zip(qp.A_eq, qp.b_eq)):
        lo_part = np.where(a > 0, a * qp.lo, a * qp.hi)
        hi_part = np.where(a > 0, a * qp.hi, a * qp.lo)
        lo_part = np.where(a == 0, 0.0, lo_part)
        hi_part = np.where(a == 0, 0.0, hi_part)
        reach_lo, reach_hi = float(np.sum(lo_part)), float(np.sum(hi_part))
        if b < reach_lo - 1e-12 or b > reach_hi + 1e-12:
            return f"equality row {i} needs {b:g} but bounds allow [{reach_lo:g}, {reach_hi:g}]"
    return None


def _null_space(A, n):
    if A.shape[0] == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0])))
    return vh[rank:].T


def solve_qp(qp: QuadraticProgram, tol: float = DEFAULT.qp, max_iter: Optional[int] = None) -> SolveResult:
    """Minimize ``x'Qx + q'x`` by a primal active-set method."""
    n = qp.n
    conflict = _bound_conflict(qp)
    if conflict:
        return SolveResult(Status.INFEASIBLE, None, float("nan"), message=conflict)
    start = solve_lp(qp.feasibility_lp())
    if not start.ok:
        return SolveResult(start.status, None, float("nan"), message="no feasible starting point")
    x = start.x.copy()

    eye = np.eye(n)
    g_rows = [qp.A_ub]
    h_rows = [qp.b_ub]
    fin_hi = np.isfinite(qp.hi)
    fin_lo = np.isfinite(qp.lo)
    g_rows += [eye[fin_hi], -eye[fin_lo]]
    h_rows += [qp.hi[fin_hi], -qp.lo[fin_lo]]
    G = np.vstack(g_rows)
    h = np.concatenate(h_rows)
    E, f = qp.A_eq, qp.b_eq
    H = 2.0 * qp.Q

    # push x onto its bounds where the LP left it within rounding of them
    x = np.clip(x, qp.lo, qp.hi)

    def independent(rows, cand):
        A = np.vstack([E, G[rows + [cand]]]) if rows or E.shape[0] else G[[cand]]
        return np.linalg.matrix_rank(A, tol=1e-10) == A.shape[0]

    work: list = []
    slack = h - G @ x
    for i in np.argsort(np.abs(slack), kind="stable"):
        if abs(slack[i]) > 1e-9:
            break
        if independent(work, int(i)):
            work.append(int(i))

    if max_iter is None:
        max_iter = 50 * (n + G.shape[0]) + 100
    mu = np.zeros(0)
    nu = np.zeros(E.shape[0])
    its = 0
    status = Status.ITERATION_LIMIT
    while its < max_iter:
        its += 1
        A_w = np.vstack([E, G[work]]) if work else E
        grad = H @ x + qp.q
        Z = _null_space(A_w, n)
        unbounded_dir = False
        if Z.shape[1] == 0:
            p = np.zeros(n)
        else:
            Hz = Z.T @ H @ Z
            gz = Z.T @ grad
            w, V = np.linalg.eigh(0.5 * (Hz + Hz.T))
            curv = w > 1e-12 * max(1.0, float(np.max(np.abs(w))))
            coeff = V.T @ gz
            flat = (~curv) & (np.abs(coeff) > 1e-14 * max(1.0, float(np.max(np.abs(gz)))))
            if flat.any():
                p = -Z @ (V[:, flat] @ coeff[flat])
                unbounded_dir = True
            else:
                p = -Z @ (V[:, curv] @ (coeff[curv] / w[curv]))
        if np.max(np.abs(p), initial=0.0) <= 1e-13 * (1.0 + np.max(np.abs(x))):
            if A_w.shape[0]:
                lam = np.linalg.lstsq(A_w.T, -grad, rcond=None)[0]
            else:
                lam = np.zeros(0)
            nu = lam[: E.shape[0]]
            mu = lam[E.shape[0]:]
            if not work or mu.min() >= -tol:
                status = Status.OPTIMAL
                break
            work.pop(int(np.argmin(mu)))
            continue
        Gp = G @ p
        step = np.inf if unbounded_dir else 1.0
        block = -1
        active = np.zeros(G.shape[0], dtype=bool)
        active[work] = True
        for i in np.flatnonzero((~active) & (Gp > 1e-14)):
            a = max((h[i] - G[i] @ x) / Gp[i], 0.0)
            if a < step:
                step, block = a, int(i)
        if not np.isfinite(step):
            return SolveResult(Status.UNBOUNDED, None, float("-inf"), iterations=its)
        x = x + step * p
        if block >= 0:
            work.append(block)

    if status is not Status.OPTIMAL:
        return SolveResult(status, None, float("nan"), iterations=its)
    mu_full = np.zeros(G.shape[0])
    mu_full[work] = np.maximum(mu, 0.0)
    grad = H @ x + qp.q
    stationarity = grad + G.T @ mu_full + (E.T @ nu if E.shape[0] else 0.0)
    primal = max(float(np.max(G @ x - h, initial=0.0)),
                 float(np.max(np.abs(E @ x - f), initial=0.0)))
    comp = float(np.max(np.abs(mu_full * (h - G @ x)), initial=0.0))
    kkt = max(float(np.max(np.abs(stationarity), initial=0.0)), primal, comp)
    scale = 1.0 + float(np.max(np.abs(grad), initial=0.0))
    if kkt > tol * scale:
        return SolveResult(Status.ITERATION_LIMIT, x, qp.objective(x), iterations=its,
                           max_violation=primal, message=f"KKT residual {kkt:.3g} above tolerance")
    return SolveResult(Status.OPTIMAL, x, qp.objective(x), iterations=its, max_violation=primal,
                       duals_ub=mu_full, duals_eq=nu, message=f"KKT residual {kkt:.3g}")
