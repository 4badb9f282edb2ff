"""SSD-constrained portfolio models.

Every model maximizes a linear objective over the admissible set (long only,
budget 1, per-asset cap) subject to the portfolio dominating a benchmark in
the second-order sense. Dominance is encoded through lower partial moments
at the benchmark's own realizations:

    E(y_k - R_z)^+ <= E(y_k - Y)^+   for every scenario k.

Two encodings of that family are available. ``full`` linearizes each
shortfall with one auxiliary variable per (scenario, level) pair. ``cuts``
(the default) adds, on demand, the supporting hyperplanes
``sum_{t in J} p_t (y_k - R_t z) <= v_k`` for the scenario set ``J`` where the
current portfolio falls short of ``y_k``; it reaches the same optimum while
solving much smaller LPs.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import kernels
from .data import ScenarioSet
from .errors import InfeasibleError, LengthMismatch, SectorTooSmall, SolverError, SupportTooSmall
from .lp import LinearProgram, SolveResult, Status, solve_lp
from .ratios import INDEX, meta
from .tolerances import DEFAULT

log = logging.getLogger(__name__)

MODELS = ("SSD", "F-SSD", "SPO", "PCA-SPO-A", "PCA-SPO-B", "MeanVar", "MinVar")
DEFAULT_BOUND = 0.3
FORMULATIONS = ("cuts", "full")


@dataclass(frozen=True)
class SsdConstraintBlock:
    """Tail targets ``v_k = E(y_k - Y)^+`` at the benchmark realizations ``y_k``."""

    levels: np.ndarray
    targets: np.ndarray
    probs: np.ndarray

    @property
    def T(self) -> int:
        return self.levels.size

    @property
    def n_aux(self) -> int:
        return self.T * self.T

    @property
    def n_rows(self) -> int:
        return self.T * self.T + self.T

    def full_rows(self, returns: np.ndarray):
        """Rows over ``[z, s]`` with ``s[t*T + k]`` the shortfall of scenario t below level k.

        ``-R_t z - s_{t,k} <= -y_k`` and ``sum_t p_t s_{t,k} <= v_k``.
        """
        R = np.asarray(returns, dtype=float)
        T, N = R.shape
        if T != self.T:
            raise LengthMismatch(f"{T} return scenarios for a {self.T}-scenario block")
        A = np.zeros((T * T + T, N + T * T))
        b = np.zeros(T * T + T)
        for t in range(T):
            for k in range(T):
                row = t * T + k
                A[row, :N] = -R[t]
                A[row, N + row] = -1.0
                b[row] = -self.levels[k]
        for k in range(T):
            row = T * T + k
            A[row, N + k + np.arange(T) * T] = self.probs
            b[row] = self.targets[k]
        return A, b

    def gaps(self, portfolio_returns: np.ndarray) -> np.ndarray:
        """``E(y_k - R_z)^+ - v_k`` for each level."""
        rz = np.ascontiguousarray(portfolio_returns, dtype=float)
        return kernels.lpm_profile(rz, np.ascontiguousarray(self.levels), np.ascontiguousarray(self.probs)) - self.targets


def build_ssd_block(scen: ScenarioSet, benchmark_returns: Optional[np.ndarray] = None) -> SsdConstraintBlock:
    y = scen.benchmark if benchmark_returns is None else np.asarray(benchmark_returns, dtype=float).reshape(-1)
    if y.size != scen.T:
        raise LengthMismatch(f"benchmark has {y.size} values for {scen.T} scenarios")
    y = np.ascontiguousarray(y, dtype=float)
    p = np.ascontiguousarray(scen.probs, dtype=float)
    v = kernels.lpm_profile(y, y, p)
    return SsdConstraintBlock(y.copy(), v, p.copy())


@dataclass
class ModelPortfolio:
    weights: np.ndarray
    model: str
    assets: tuple = ()
    objective: float = float("nan")
    bound: float = DEFAULT_BOUND
    sector_weights: dict = field(default_factory=dict)
    support: tuple = ()
    diagnostics: dict = field(default_factory=dict)

    def violations(self, sum_tol: float = 1e-8, bound_tol: float = 1e-10) -> list:
        """Admissible-set checks; empty when the portfolio is in Z."""
        z = self.weights
        out = []
        if abs(z.sum() - 1.0) > sum_tol:
            out.append(f"weights sum to {z.sum():.12g}")
        if z.min() < -bound_tol:
            out.append(f"negative weight {z.min():.3g}")
        if z.max() > self.bound + bound_tol:
            out.append(f"weight {z.max():.12g} above cap {self.bound}")
        return out


@dataclass(frozen=True)
class DominanceCheck:
    dominates: bool
    worst_gap: float
    gaps: np.ndarray


def verify_ssd_dominance(z, scen: ScenarioSet, benchmark_returns=None, tol: float = DEFAULT.dominance) -> DominanceCheck:
    """Brute-force SSD check at every benchmark realization."""
    block = build_ssd_block(scen, benchmark_returns)
    gaps = block.gaps(scen.returns @ np.asarray(z, dtype=float))
    worst = float(gaps.max())
    return DominanceCheck(worst <= tol, worst, gaps)


# ------------------------------------------------------------------ solving


def _admissible(N: int, bound: float, active: Optional[np.ndarray]):
    hi = np.full(N, float(bound))
    if active is not None:
        hi = np.where(active, hi, 0.0)
    return np.ones((1, N)), np.ones(1), np.zeros(N), hi


def _raise_for(result: SolveResult, what: str):
    if result.status is Status.INFEASIBLE:
        raise InfeasibleError(f"{what}: no admissible portfolio dominates the benchmark", result.status)
    raise SolverError(f"{what}: solver stopped with status {result.status.value}", result.status)


def _clean(z: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.clip(z, 0.0, hi)


def solve_ssd_lp(
    returns: np.ndarray,
    block: SsdConstraintBlock,
    coef: np.ndarray,
    bound: float = DEFAULT_BOUND,
    active: Optional[np.ndarray] = None,
    formulation: str = "cuts",
    what: str = "SSD model",
    max_rounds: int = 500,
):
    """Maximize ``coef @ z`` over the admissible set subject to the SSD block.

    Returns ``(z, objective, diagnostics)``; raises InfeasibleError or
    SolverError when no optimum is found.
    """
    R = np.ascontiguousarray(returns, dtype=float)
    T, N = R.shape
    coef = np.asarray(coef, dtype=float)
    if coef.size != N:
        raise LengthMismatch(f"{coef.size} objective coefficients for {N} assets")
    if R.shape[0] != block.T:
        raise LengthMismatch(f"{T} scenarios for a {block.T}-level block")
    A_eq, b_eq, lo, hi = _admissible(N, bound, active)
    if hi.sum() < 1.0 - 1e-12:
        raise InfeasibleError(f"{what}: caps sum to {hi.sum():.6g} < 1", Status.INFEASIBLE)

    if formulation == "full":
        A, b = block.full_rows(R)
        n = N + block.n_aux
        lp = LinearProgram(
            np.concatenate([coef, np.zeros(block.n_aux)]),
            A, b,
            np.hstack([A_eq, np.zeros((1, block.n_aux))]), b_eq,
            np.zeros(n), np.concatenate([hi, np.full(block.n_aux, np.inf)]),
        )
        res = solve_lp(lp)
        if not res.ok:
            _raise_for(res, what)
        z = _clean(res.x[:N], hi)
        return z, float(coef @ z), {"iterations": res.iterations, "rounds": 1, "cuts": block.n_rows,
                                    "max_violation": res.max_violation}
    if formulation != "cuts":
        raise ValueError(f"unknown formulation {formulation!r}")

    cut_rows: list = []
    cut_rhs: list = []
    seen = set()
    iterations = 0
    y, p, v = block.levels, block.probs, block.targets
    for rounds in range(1, max_rounds + 1):
        lp = LinearProgram(
            coef,
            np.array(cut_rows) if cut_rows else None,
            np.array(cut_rhs) if cut_rhs else None,
            A_eq, b_eq, lo, hi,
        )
        res = solve_lp(lp)
        iterations += res.iterations
        if not res.ok:
            _raise_for(res, what)
        z = res.x
        rz = R @ z
        gaps = block.gaps(rz)
        bad = np.flatnonzero(gaps > DEFAULT.cut)
        if bad.size == 0:
            z = _clean(z, hi)
            return z, float(coef @ z), {"iterations": iterations, "rounds": rounds, "cuts": len(cut_rows),
                                        "max_violation": res.max_violation}
        added = 0
        for k in bad:
            J = rz < y[k]
            key = (int(k), J.tobytes())
            if key in seen:
                continue
            seen.add(key)
            pj = p[J]
            cut_rows.append(-(pj @ R[J]))
            cut_rhs.append(v[k] - y[k] * pj.sum())
            added += 1
        if added == 0:
            # every violated cut is already present: the violation is LP round-off
            if gaps.max() <= DEFAULT.max_violation:
                z = _clean(z, hi)
                return z, float(coef @ z), {"iterations": iterations, "rounds": rounds,
                                            "cuts": len(cut_rows), "max_violation": res.max_violation}
            raise SolverError(f"{what}: cutting planes stalled with gap {gaps.max():.3g}")
    raise SolverError(f"{what}: no convergence after {max_rounds} cut rounds", Status.ITERATION_LIMIT)


def _portfolio(z, model, scen: ScenarioSet, objective, bound, diag, **kw) -> ModelPortfolio:
    support = tuple(scen.assets[i] for i in np.flatnonzero(z > DEFAULT.support_eps))
    return ModelPortfolio(z, model, scen.assets, objective, bound, support=support, diagnostics=diag, **kw)


def solve_nominal_ssd(scen: ScenarioSet, bound: float = DEFAULT_BOUND, formulation: str = "cuts",
                      model: str = "SSD") -> ModelPortfolio:
    """Maximize expected return subject to dominating the benchmark."""
    block = build_ssd_block(scen)
    z, obj, diag = solve_ssd_lp(scen.returns, block, scen.mean_returns, bound, formulation=formulation, what=model)
    return _portfolio(z, model, scen, obj, bound, diag)


# ------------------------------------------------------------ ratio scoring


def zscore(col: np.ndarray) -> np.ndarray:
    """Cross-sectional standardization; a constant column maps to zeros."""
    col = np.asarray(col, dtype=float)
    sd = col.std()
    if not np.isfinite(sd) or sd <= 1e-14 * max(1.0, float(np.abs(col).max(initial=0.0))):
        return np.zeros_like(col)
    return (col - col.mean()) / sd


def ratio_score(ratio_matrix: np.ndarray, labels: Sequence[str], weights: Sequence[float],
                signs: Optional[Sequence[int]] = None, standardize: bool = True) -> np.ndarray:
    """Per-asset signed, weighted ratio score ``sum_i sign_i w_i x_i``.

    ``ratio_matrix`` is asset x ratio in canonical column order. Signs
    default to each ratio's preferred direction.
    """
    X = np.atleast_2d(np.asarray(ratio_matrix, dtype=float))
    if signs is None:
        signs = [meta(lbl).sign for lbl in labels]
    if not (len(labels) == len(weights) == len(signs)):
        raise ValueError("labels, weights and signs must have equal length")
    score = np.zeros(X.shape[0])
    for lbl, w, s in zip(labels, weights, signs):
        col = X[:, INDEX[lbl]]
        score += s * w * (zscore(col) if standardize else col)
    return score


def solve_fssd(scen: ScenarioSet, ratio_matrix: np.ndarray, terms, alpha: float = 0.5,
               bound: float = DEFAULT_BOUND, standardize: bool = True, formulation: str = "cuts",
               model: str = "F-SSD") -> ModelPortfolio:
    """Blend of ratio score and expected return, ``alpha * FR + (1 - alpha) * E(R)``.

    ``terms`` holds (label, weight, sign) triples such as those from
    ``pca.fssd_ratio_weights``.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    labels = [t.label for t in terms]
    weights = np.array([t.weight for t in terms], dtype=float)
    signs = [t.sign for t in terms]
    if np.any(weights < 0) or weights.sum() > 1.0 + 1e-12:
        raise ValueError(f"ratio weights must be nonnegative with sum <= 1, got {weights.sum():.6g}")
    fr = ratio_score(ratio_matrix, labels, weights, signs, standardize)
    coef = alpha * fr + (1.0 - alpha) * scen.mean_returns
    block = build_ssd_block(scen)
    z, obj, diag = solve_ssd_lp(scen.returns, block, coef, bound, formulation=formulation, what=model)
    diag = dict(diag, ratio_component=float(fr @ z), return_component=float(scen.mean_returns @ z))
    return _portfolio(z, model, scen, obj, bound, diag)


# ---------------------------------------------------------------- two step


def sector_cap(n: int, bound: float) -> float:
    """Per-asset cap that keeps an ``n``-asset sector feasible."""
    if n * bound >= 1.0 - 1e-12:
        return bound
    return min(1.0, max(bound, math.ceil(100.0 / n) / 100.0))


def solve_spo_step1(sector_scen: ScenarioSet, ratio_matrix: np.ndarray, labels: Sequence[str],
                    weights: Optional[Sequence[float]] = None, bound: float = DEFAULT_BOUND,
                    standardize: bool = True, formulation: str = "cuts", model: str = "SPO",
                    sector: str = "") -> ModelPortfolio:
    """Maximize the sector's signed ratio score subject to dominating the sector benchmark."""
    n = sector_scen.N
    if weights is None:
        weights = [1.0 / len(labels)] * len(labels)
    if any(w < 0 for w in weights):
        raise ValueError("sector objective weights must be nonnegative")
    cap = sector_cap(n, bound)
    if cap != bound:
        warnings.warn(f"sector {sector!r} has {n} assets; cap raised from {bound} to {cap}", SectorTooSmall,
                      stacklevel=2)
    coef = ratio_score(ratio_matrix, labels, weights, standardize=standardize)
    block = build_ssd_block(sector_scen)
    z, obj, diag = solve_ssd_lp(sector_scen.returns, block, coef, cap, formulation=formulation,
                                what=f"{model} step 1 ({sector})")
    return _portfolio(z, model, sector_scen, obj, cap, diag)


def solve_spo_step2(scen: ScenarioSet, step1: Mapping[str, ModelPortfolio], bound: float = DEFAULT_BOUND,
                    formulation: str = "cuts", model: str = "SPO") -> ModelPortfolio:
    """Pool the sector supports and maximize ``sum_j (E r_j + z_j^*) z_j`` against the market benchmark."""
    pos = {a: i for i, a in enumerate(scen.assets)}
    star = np.zeros(scen.N)
    active = np.zeros(scen.N, dtype=bool)
    for sector, res in step1.items():
        for a, w in zip(res.assets, res.weights):
            if w > DEFAULT.support_eps:
                i = pos[a]
                star[i] = w
                active[i] = True
    if active.sum() * bound < 1.0 - 1e-12:
        raise SupportTooSmall(f"{model}: pooled support has {int(active.sum())} assets, cap {bound}")
    coef = np.where(active, scen.mean_returns + star, 0.0)
    block = build_ssd_block(scen)
    z, obj, diag = solve_ssd_lp(scen.returns, block, coef, bound, active=active, formulation=formulation,
                                what=f"{model} step 2")
    sector_weights = {s: res.weights for s, res in step1.items()}
    return _portfolio(z, model, scen, obj, bound, diag, sector_weights=sector_weights)


def solve_spo(scen: ScenarioSet, ratio_matrix: np.ndarray, sector_labels: Mapping[str, Sequence[str]],
              sector_weights: Optional[Mapping[str, Sequence[float]]] = None, bound: float = DEFAULT_BOUND,
              standardize: bool = True, formulation: str = "cuts", model: str = "SPO") -> ModelPortfolio:
    """Both steps: one ratio-driven SSD model per sector, then the pooling model.

    ``sector_labels`` maps each sector to its four ratio labels.
    """
    X = np.atleast_2d(np.asarray(ratio_matrix, dtype=float))
    sectors = [s for s in dict.fromkeys(scen.asset_sectors)]
    step1 = {}
    for s in sectors:
        idx = scen.sector_indices(s)
        w = None if sector_weights is None else sector_weights.get(s)
        step1[s] = solve_spo_step1(scen.sector(s), X[idx], sector_labels[s], w, bound, standardize,
                                   formulation, model, sector=s)
    return solve_spo_step2(scen, step1, bound, formulation, model)
