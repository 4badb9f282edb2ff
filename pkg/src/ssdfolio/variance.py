"""Minimum-variance and mean-variance portfolios over the admissible set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ScenarioSet
from .errors import InfeasibleError, SolverError
from .lp import QuadraticProgram, Status, solve_qp
from .ssd import DEFAULT_BOUND, ModelPortfolio
from .tolerances import DEFAULT


@dataclass(frozen=True)
class CovarianceEstimate:
    cov: np.ndarray
    mean: np.ndarray
    benchmark_mean: float
    assets: tuple = ()

    def __post_init__(self):
        S = np.asarray(self.cov, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise ValueError("covariance must be square")
        if np.max(np.abs(S - S.T), initial=0.0) > 1e-12 * max(1.0, float(np.abs(S).max(initial=0.0))):
            raise ValueError("covariance must be symmetric")
        S = 0.5 * (S + S.T)
        w, V = np.linalg.eigh(S)
        if w.size and w[0] < 0.0:
            S = (V * np.maximum(w, 0.0)) @ V.T
            S = 0.5 * (S + S.T)
        object.__setattr__(self, "cov", S)
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float).reshape(-1))
        if not self.assets:
            object.__setattr__(self, "assets", tuple(range(S.shape[0])))

    @property
    def N(self) -> int:
        return self.cov.shape[0]

    @classmethod
    def from_scenarios(cls, scen: ScenarioSet) -> "CovarianceEstimate":
        """Sample covariance (T - 1 divisor) of the in-sample returns."""
        R = scen.returns
        return cls(np.cov(R, rowvar=False, ddof=1).reshape(scen.N, scen.N), R.mean(axis=0),
                   float(scen.benchmark.mean()), scen.assets)


def _solve(cov: CovarianceEstimate, bound: float, floor, model: str) -> ModelPortfolio:
    N = cov.N
    if N * bound < 1.0 - 1e-12:
        raise InfeasibleError(f"{model}: {N} assets cannot reach budget 1 under cap {bound}", Status.INFEASIBLE)
    A_ub = b_ub = None
    if floor is not None:
        A_ub, b_ub = -cov.mean[None, :], np.array([-floor])
    qp = QuadraticProgram(cov.cov, A_ub=A_ub, b_ub=b_ub, A_eq=np.ones((1, N)), b_eq=[1.0], lo=0.0, hi=bound)
    res = solve_qp(qp)
    if res.status is Status.INFEASIBLE:
        raise InfeasibleError(f"{model}: {res.message or 'no admissible portfolio'}", res.status)
    if not res.ok:
        raise SolverError(f"{model}: {res.status.value} ({res.message})", res.status)
    z = np.clip(res.x, 0.0, bound)
    support = tuple(cov.assets[i] for i in np.flatnonzero(z > DEFAULT.support_eps))
    return ModelPortfolio(z, model, cov.assets, float(z @ cov.cov @ z), bound, support=support,
                          diagnostics={"iterations": res.iterations, "kkt": res.message})


def solve_min_var(cov: CovarianceEstimate, bound: float = DEFAULT_BOUND, model: str = "MinVar") -> ModelPortfolio:
    """Minimize portfolio variance over the admissible set."""
    return _solve(cov, bound, None, model)


def solve_mean_var(cov: CovarianceEstimate, bound: float = DEFAULT_BOUND, target=None,
                   model: str = "MeanVar") -> ModelPortfolio:
    """Minimum variance with expected return at least ``target`` (default: benchmark mean)."""
    mu = cov.benchmark_mean if target is None else float(target)
    # best attainable mean: fill the highest-mean assets up to the cap
    order = np.argsort(-cov.mean, kind="stable")
    left, best = 1.0, 0.0
    for i in order:
        take = min(bound, left)
        best += take * cov.mean[i]
        left -= take
        if left <= 0:
            break
    if mu > best + 1e-15:
        raise InfeasibleError(f"{model}: return floor {mu:.6g} above attainable {best:.6g}", Status.INFEASIBLE)
    return _solve(cov, bound, mu, model)
