"""Numerical tolerances shared by the solvers and model checks."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    lp: float = 1e-9
    qp: float = 1e-8
    pivot: float = 1e-11
    # consecutive degenerate pivots before Bland's rule takes over
    degenerate_switch: int = 50
    max_violation: float = 1e-7
    cut: float = 1e-10
    dominance: float = 1e-7
    support_eps: float = 1e-6
    eig_floor: float = -1e-10
    rank_eps: float = 1e-12


DEFAULT = Tolerances()
