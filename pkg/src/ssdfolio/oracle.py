"""Exhaustive grid search over the capped simplex, used to cross-check the LP models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .data import ScenarioSet
from .ssd import build_ssd_block


@dataclass(frozen=True)
class GridResult:
    found: bool
    objective: float
    weights: np.ndarray


def grid_search(scen: ScenarioSet, coef, bound: float = 0.3, active: Optional[np.ndarray] = None,
                resolution: float = 0.01, benchmark_returns=None, tol: float = 1e-12) -> GridResult:
    """Best ``coef @ z`` over SSD-feasible grid points ``z = counts * resolution``."""
    units = int(round(1.0 / resolution))
    if abs(units * resolution - 1.0) > 1e-12:
        raise ValueError("resolution must divide 1")
    cap = int(np.floor(bound / resolution + 1e-9))
    block = build_ssd_block(scen, benchmark_returns)
    act = np.ones(scen.N, dtype=bool) if active is None else np.asarray(active, dtype=bool)
    found, value, counts = kernels.grid_best(
        np.ascontiguousarray(scen.returns, dtype=float),
        np.ascontiguousarray(scen.probs, dtype=float),
        np.ascontiguousarray(block.levels, dtype=float),
        np.ascontiguousarray(block.targets, dtype=float),
        np.ascontiguousarray(coef, dtype=float),
        units, cap, act, tol,
    )
    return GridResult(bool(found), float(value), counts / float(units))
