"""Principal components of the ratio panel and dominant-ratio extraction.

Two extraction rules are provided. Rule A walks the retained components in
order and takes the ratio with the largest absolute loading on each (at most
two per category). Rule B takes, per category, the ratio with the largest
communality.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import DataError, DataTooShort, DegenerateColumn, EigDecompositionFailure, RankDeficientWarning
from .ratios import CATEGORIES, LABELS, Category, meta
from .tolerances import DEFAULT

MODES = ("correlation", "covariance")


@dataclass(frozen=True)
class RatioObservationMatrix:
    """Stacked (asset, quarter) rows by the 11 canonical ratio columns."""

    values: np.ndarray
    group: str = ""
    labels: tuple = LABELS

    def __post_init__(self):
        X = np.atleast_2d(np.array(self.values, dtype=float))
        if tuple(self.labels) != LABELS:
            raise DataError("ratio columns must follow the canonical order")
        if X.shape[1] != len(LABELS):
            raise DataError(f"expected {len(LABELS)} ratio columns, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise DataError(f"group {self.group!r}: observation matrix has missing entries")
        X.setflags(write=False)
        object.__setattr__(self, "values", X)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_panel(cls, ratios, assets: Sequence, group: str = "", until=None) -> "RatioObservationMatrix":
        """Stack the panel's quarters (optionally those before ``until``) for ``assets``."""
        keep = np.ones(len(ratios.quarters), dtype=bool)
        if until is not None:
            keep = ratios.quarters < pd.Timestamp(until)
        idx = [ratios.assets.index(a) for a in assets]
        block = ratios.values[keep][:, idx, :]  # quarter x asset x ratio
        rows = block.transpose(1, 0, 2).reshape(-1, len(LABELS))
        return cls(rows, group)


def center_scale(X, mode: str = "correlation") -> np.ndarray:
    """Mean-center columns; in correlation mode also divide by the sample sd."""
    if mode not in MODES:
        raise ValueError(f"unknown scaling mode {mode!r}")
    A = X.values if isinstance(X, RatioObservationMatrix) else np.asarray(X, dtype=float)
    if A.shape[0] < 2:
        raise DataTooShort("need at least two observations")
    Y = A - A.mean(axis=0)
    if mode == "correlation":
        sd = Y.std(axis=0, ddof=1)
        flat = sd <= 1e-12 * np.maximum(1.0, np.abs(A).max(axis=0))
        if flat.any():
            names = [LABELS[i] if A.shape[1] == len(LABELS) else str(i) for i in np.flatnonzero(flat)]
            raise DegenerateColumn(f"constant column(s) {names}")
        Y = Y / sd
    return Y


@dataclass(frozen=True)
class PcaSolution:
    eigenvalues: np.ndarray
    retained_count: int
    loadings: np.ndarray
    communalities: np.ndarray
    cumulative_variance: np.ndarray
    scaling_mode: str
    total_variance: float
    eigenvectors: Optional[np.ndarray] = None
    group: str = ""
    labels: tuple = LABELS

    @property
    def variance_proportions(self) -> np.ndarray:
        return self.eigenvalues / self.total_variance

    @property
    def covered(self) -> float:
        """Cumulative variance fraction of the retained components."""
        return float(self.cumulative_variance[self.retained_count - 1])

    @classmethod
    def from_loadings(
        cls,
        loadings,
        cumulative_variance: Optional[Sequence[float]] = None,
        variance_proportions: Optional[Sequence[float]] = None,
        total_variance: float = float(len(LABELS)),
        group: str = "",
    ) -> "PcaSolution":
        """Rebuild a solution from a published loadings matrix.

        Eigenvalues default to the column sums of squared loadings. Published
        variance figures, when given, take precedence over those derived from
        rounded loadings.
        """
        L = np.asarray(loadings, dtype=float)
        if L.shape[0] != len(LABELS):
            raise DataError(f"loadings need {len(LABELS)} rows")
        k = L.shape[1]
        if variance_proportions is not None:
            eig = np.asarray(variance_proportions, dtype=float) * total_variance
        else:
            eig = (L ** 2).sum(axis=0)
        if cumulative_variance is not None:
            cv = np.asarray(cumulative_variance, dtype=float)
        else:
            cv = np.cumsum(eig) / total_variance
        if eig.size != k or cv.size != k:
            raise DataError("variance figures must match the number of components")
        return cls(
            eigenvalues=eig,
            retained_count=k,
            loadings=L,
            communalities=(L ** 2).sum(axis=1),
            cumulative_variance=cv,
            scaling_mode="published",
            total_variance=float(total_variance),
            group=group,
        )


def _fix_signs(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for c in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, c])))
        if V[i, c] < 0:
            V[:, c] = -V[:, c]
    return V


def pca(
    X,
    mode: str = "correlation",
    variance_target: float = 0.80,
    component_cap: int = 4,
    group: str = "",
) -> PcaSolution:
    """Eigen-decompose the covariance (or correlation) matrix of the ratio columns."""
    A = X.values if isinstance(X, RatioObservationMatrix) else np.asarray(X, dtype=float)
    group = group or getattr(X, "group", "")
    k = A.shape[1]
    if A.shape[0] <= k:
        raise DataTooShort(f"group {group!r}: {A.shape[0]} observations for {k} ratios")
    if component_cap < 1:
        raise ValueError("component_cap must be >= 1")
    Y = center_scale(A, mode)
    C = Y.T @ Y / (Y.shape[0] - 1)
    C = 0.5 * (C + C.T)
    try:
        w, V = np.linalg.eigh(C)
    except np.linalg.LinAlgError as exc:
        raise EigDecompositionFailure(f"group {group!r}: {exc}") from None
    w, V = w[::-1], V[:, ::-1]
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[-1] < DEFAULT.eig_floor * scale:
        raise EigDecompositionFailure(f"group {group!r}: eigenvalue {w[-1]:.3g} below floor")
    w = np.where(w < 0.0, 0.0, w)
    V = _fix_signs(V)
    total = float(w.sum())
    if total <= 0.0:
        raise DegenerateColumn(f"group {group!r}: zero total variance")
    cv = np.cumsum(w) / total
    reach = np.flatnonzero(cv >= variance_target - 1e-12)
    needed = int(reach[0]) + 1 if reach.size else k
    retained = min(component_cap, needed, k)
    if np.any(w[:retained] < DEFAULT.rank_eps):
        warnings.warn(f"group {group!r}: retained eigenvalue below {DEFAULT.rank_eps:g}", RankDeficientWarning,
                      stacklevel=2)
    L = V[:, :retained] * np.sqrt(w[:retained])
    return PcaSolution(
        eigenvalues=w,
        retained_count=retained,
        loadings=L,
        communalities=(L ** 2).sum(axis=1),
        cumulative_variance=cv,
        scaling_mode=mode,
        total_variance=total,
        eigenvectors=V,
        group=group,
    )


def full_loadings(sol: PcaSolution) -> np.ndarray:
    """Loadings for every component (needs the eigenvectors)."""
    if sol.eigenvectors is None:
        raise ValueError("solution carries no eigenvectors")
    return sol.eigenvectors * np.sqrt(sol.eigenvalues)


# ---------------------------------------------------------------- extraction


@dataclass(frozen=True)
class Selection:
    label: str
    category: Category
    source: object  # component index (rule A) or category (rule B)


@dataclass(frozen=True)
class ExtractionResult:
    rule: str
    selected: tuple
    cumulative_variance_covered: float
    group: str = ""

    @property
    def labels(self) -> tuple:
        return tuple(s.label for s in self.selected)


def extract_a(sol: PcaSolution, max_per_category: Optional[int] = 2, n_select: int = 4) -> ExtractionResult:
    """Per retained component, the unselected ratio with the largest |loading|."""
    chosen: list = []
    per_cat = {c: 0 for c in CATEGORIES}
    for c in range(min(sol.retained_count, n_select)):
        best, best_val = None, -1.0
        for i, label in enumerate(sol.labels):
            cat = meta(label).category
            if label in chosen or (max_per_category is not None and per_cat[cat] >= max_per_category):
                continue
            val = abs(sol.loadings[i, c])
            if val > best_val:
                best, best_val = i, val
        label = sol.labels[best]
        chosen.append(label)
        per_cat[meta(label).category] += 1
    selected = tuple(Selection(lbl, meta(lbl).category, c) for c, lbl in enumerate(chosen))
    return ExtractionResult("A", selected, sol.covered, sol.group)


def extract_b(sol: PcaSolution) -> ExtractionResult:
    """Per category, the member ratio with the largest communality."""
    selected = []
    for cat in CATEGORIES:
        best, best_val = None, -1.0
        for i, label in enumerate(sol.labels):
            if meta(label).category is not cat:
                continue
            if sol.communalities[i] > best_val:
                best, best_val = label, sol.communalities[i]
        selected.append(Selection(best, cat, cat))
    return ExtractionResult("B", tuple(selected), sol.covered, sol.group)


def extract(sol: PcaSolution, rule: str) -> ExtractionResult:
    if rule == "A":
        return extract_a(sol)
    if rule == "B":
        return extract_b(sol)
    raise ValueError(f"unknown extraction rule {rule!r}")


@dataclass(frozen=True)
class WeightedRatio:
    label: str
    weight: float
    sign: int


def fssd_ratio_weights(sol: PcaSolution, max_per_category: Optional[int] = None) -> tuple:
    """Ratio terms for the blended objective: one ratio per leading component.

    Each term is weighted by its component's share of total variance and
    signed by the ratio's preferred direction. Selection is uncapped by
    default: every pick is the component's top loading.
    """
    ext = extract_a(sol, max_per_category=max_per_category)
    props = sol.variance_proportions
    return tuple(WeightedRatio(s.label, float(props[s.source]), meta(s.label).sign) for s in ext.selected)


# ------------------------------------------------------------------ reports


def loadings_report(sol: PcaSolution) -> pd.DataFrame:
    """Ratios grouped by category, one column per retained PC plus communality; CV in the last row."""
    k = sol.retained_count
    pcs = [f"PC{c + 1}" for c in range(k)]
    order = [i for cat in CATEGORIES for i, lbl in enumerate(sol.labels) if meta(lbl).category is cat]
    rows = []
    for i in order:
        lbl = sol.labels[i]
        rows.append([meta(lbl).category.value, lbl, *sol.loadings[i, :k], sol.communalities[i]])
    rows.append(["", "CV", *sol.cumulative_variance[:k], np.nan])
    return pd.DataFrame(rows, columns=["category", "ratio", *pcs, "Comm."])


def extraction_report(results: Mapping[str, ExtractionResult]) -> pd.DataFrame:
    """One row per group: the selected ratios and the covered variance in percent."""
    rows = []
    rule = None
    for group, res in results.items():
        rule = rule or res.rule
        if res.rule != rule:
            raise ValueError("cannot mix extraction rules in one report")
        rows.append([group, *res.labels, round(100.0 * res.cumulative_variance_covered, 2)])
    if rule == "B":
        cols = [c.value for c in CATEGORIES]
    else:
        width = max((len(r) - 2 for r in rows), default=4)
        cols = [f"R{i + 1}" for i in range(width)]
    return pd.DataFrame(rows, columns=["sector", *cols, "CV"])


@dataclass
class GroupExtraction:
    """PCA and both extraction rules for one asset group."""

    solution: PcaSolution
    rule_a: ExtractionResult = field(init=False)
    rule_b: ExtractionResult = field(init=False)

    def __post_init__(self):
        self.rule_a = extract_a(self.solution)
        self.rule_b = extract_b(self.solution)
