"""Out-of-sample performance measures.

Tail measures follow a loss convention: VaR and CVaR are reported as
positive numbers for losses. Ratios whose excess mean is not positive are
undefined (``None``, rendered ``-----``); a positive excess over a zero (or
negative) risk denominator is ``math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import DataError, ZeroDenominator

UNDEFINED = None
UNDEFINED_TEXT = "-----"
DIVISORS = ("paper", "tail_mean")
DEFAULT_LEVELS = (0.95, 0.97)


def _series(s) -> np.ndarray:
    x = np.asarray(s, dtype=float).reshape(-1)
    if x.size == 0:
        raise DataError("empty return series")
    if not np.all(np.isfinite(x)):
        raise DataError("return series has non-finite values")
    return x


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def tail_count(M: int, alpha: float) -> int:
    """k = floor(M (1 - alpha)) + 1, capped at M."""
    _check_alpha(alpha)
    # the small offset keeps e.g. 100 * (1 - 0.97) from flooring to 2
    return min(M, int(math.floor(M * (1.0 - alpha) + 1e-9)) + 1)


def _divisor(M: int, alpha: float, k: int, mode: str) -> float:
    if mode == "paper":
        return M * (1.0 - alpha)
    if mode == "tail_mean":
        return float(k)
    raise ValueError(f"unknown divisor mode {mode!r}")


def mean_return(s) -> float:
    return float(np.mean(_series(s)))


def downside_deviation(s) -> float:
    x = _series(s)
    return float(np.sqrt(np.sum(np.minimum(x, 0.0) ** 2) / x.size))


def var_cvar(s, alpha: float, divisor: str = "paper") -> tuple:
    """(VaR, CVaR) at confidence ``alpha``, both positive for losses."""
    x = np.sort(_series(s))
    M = x.size
    k = tail_count(M, alpha)
    var = -x[k - 1]
    cvar = -x[:k].sum() / _divisor(M, alpha, k, divisor)
    return float(var), float(cvar)


def _excess(x, rf):
    return float(np.mean(x)) - rf


def sharpe(s, rf: float = 0.0) -> Optional[float]:
    x = _series(s)
    if x.size < 2:
        raise DataError("Sharpe ratio needs at least two returns")
    ex = _excess(x, rf)
    if ex <= 0:
        return UNDEFINED
    sd = float(np.std(x, ddof=1))
    # a constant series leaves only round-off in sd
    if sd <= 1e-14 * float(np.abs(x).max()):
        return math.inf
    return ex / sd


def sortino(s, rf: float = 0.0) -> Optional[float]:
    x = _series(s)
    ex = _excess(x, rf)
    if ex <= 0:
        return UNDEFINED
    dd = downside_deviation(x)
    return math.inf if dd == 0 else ex / dd


def starr(s, alpha: float, rf: float = 0.0, divisor: str = "paper") -> Optional[float]:
    x = _series(s)
    ex = _excess(x, rf)
    if ex <= 0:
        return UNDEFINED
    _, cvar = var_cvar(x, alpha, divisor)
    return math.inf if cvar <= 0 else ex / cvar


def rachev(s, alpha: float, divisor: str = "paper") -> float:
    """Best-tail mean return over the absolute worst-tail mean return."""
    x = np.sort(_series(s))
    M = x.size
    k = tail_count(M, alpha)
    d = _divisor(M, alpha, k, divisor)
    best = x[-k:].sum() / d
    worst = x[:k].sum() / d
    if worst == 0:
        raise ZeroDenominator("worst-tail mean is zero")
    return float(best / abs(worst))


def measure_names(levels: Sequence[float] = DEFAULT_LEVELS) -> tuple:
    tags = [f"{round(100 * a):d}" for a in levels]
    return (
        "mean_return", "sharpe", "sortino", "dd",
        *[f"var{t}" for t in tags], *[f"cvar{t}" for t in tags],
        *[f"rachev{t}" for t in tags], *[f"starr{t}" for t in tags],
    )


MEASURES = measure_names()


@dataclass(frozen=True)
class MetricsRow:
    values: Mapping[str, Optional[float]]
    divisor: str = "paper"
    rf: float = 0.0

    def __getitem__(self, name):
        return self.values[name]

    def __getattr__(self, name):
        if name.startswith("_") or name in ("values", "divisor", "rf"):
            raise AttributeError(name)
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None


def compute_metrics(s, rf: float = 0.0, divisor: str = "paper",
                    levels: Sequence[float] = DEFAULT_LEVELS) -> MetricsRow:
    x = _series(s)
    out = {
        "mean_return": mean_return(x),
        "sharpe": sharpe(x, rf) if x.size >= 2 else UNDEFINED,
        "sortino": sortino(x, rf),
        "dd": downside_deviation(x),
    }
    tags = [f"{round(100 * a):d}" for a in levels]
    tails = {t: var_cvar(x, a, divisor) for t, a in zip(tags, levels)}
    for t in tags:
        out[f"var{t}"] = tails[t][0]
    for t in tags:
        out[f"cvar{t}"] = tails[t][1]
    for t, a in zip(tags, levels):
        try:
            out[f"rachev{t}"] = rachev(x, a, divisor)
        except ZeroDenominator:
            k = tail_count(x.size, a)
            out[f"rachev{t}"] = math.inf if np.sort(x)[-k:].sum() > 0 else UNDEFINED
    for t, a in zip(tags, levels):
        out[f"starr{t}"] = starr(x, a, rf, divisor)
    return MetricsRow(out, divisor, rf)


def render(value) -> str:
    if value is None:
        return UNDEFINED_TEXT
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.10g}"


def metrics_table(rows: Mapping[str, MetricsRow], measures: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """Measures down, models across; cells rendered as text."""
    if measures is None:
        first = next(iter(rows.values()), None)
        measures = tuple(first.values) if first is not None else MEASURES
    data = {model: [render(row[m]) for m in measures] for model, row in rows.items()}
    return pd.DataFrame(data, index=pd.Index(measures, name="measure"))
