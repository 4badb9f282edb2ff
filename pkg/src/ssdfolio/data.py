"""Price, ratio, sector and benchmark data: loading, cleaning, scenarios."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import (
    DataError,
    EmptySector,
    EmptyUniverse,
    GapRemaining,
    LengthMismatch,
    NonPositivePrice,
    NoRatioData,
    WindowOutOfRange,
)
from .ratios import LABELS, RATIOS

log = logging.getLogger(__name__)

MAX_MISSING_PRICE_QUARTERS = 2
MAX_MISSING_RATIO_QUARTERS = 4


def _strictly_increasing(index: pd.DatetimeIndex, what: str) -> None:
    if len(index) > 1 and not np.all(np.diff(index.asi8) > 0):
        raise DataError(f"{what} must be strictly increasing")


@dataclass(frozen=True)
class PricePanel:
    """Weekly adjusted closes, ``prices[week, asset]``; NaN marks a missing cell."""

    assets: tuple
    dates: pd.DatetimeIndex
    prices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "assets", tuple(self.assets))
        object.__setattr__(self, "dates", pd.DatetimeIndex(self.dates))
        prices = np.array(self.prices, dtype=float)
        if prices.shape != (len(self.dates), len(self.assets)):
            raise LengthMismatch(
                f"price matrix is {prices.shape}, expected ({len(self.dates)}, {len(self.assets)})"
            )
        _strictly_increasing(self.dates, "price dates")
        prices.setflags(write=False)
        object.__setattr__(self, "prices", prices)

    @classmethod
    def from_frame(cls, wide: pd.DataFrame) -> "PricePanel":
        return cls(tuple(wide.columns), pd.DatetimeIndex(wide.index), wide.to_numpy(dtype=float))

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.prices, index=self.dates, columns=list(self.assets))

    def subset(self, assets: Sequence) -> "PricePanel":
        idx = [self.assets.index(a) for a in assets]
        return PricePanel(tuple(assets), self.dates, self.prices[:, idx])

    def __eq__(self, other):
        if not isinstance(other, PricePanel):
            return NotImplemented
        return (
            self.assets == other.assets
            and self.dates.equals(other.dates)
            and np.array_equal(self.prices, other.prices, equal_nan=True)
        )


@dataclass(frozen=True)
class RatioPanel:
    """Quarterly ratio values, ``values[quarter, asset, ratio]`` in canonical ratio order."""

    assets: tuple
    quarters: pd.DatetimeIndex
    values: np.ndarray
    ratio_meta: tuple = RATIOS

    def __post_init__(self):
        object.__setattr__(self, "assets", tuple(self.assets))
        object.__setattr__(self, "quarters", pd.DatetimeIndex(self.quarters))
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.quarters), len(self.assets), len(RATIOS)):
            raise LengthMismatch(
                f"ratio tensor is {values.shape}, expected "
                f"({len(self.quarters)}, {len(self.assets)}, {len(RATIOS)})"
            )
        if tuple(self.ratio_meta) != RATIOS:
            raise DataError("ratio metadata must be the 11 canonical ratios")
        _strictly_increasing(self.quarters, "ratio quarters")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def labels(self) -> tuple:
        return LABELS

    def subset(self, assets: Sequence) -> "RatioPanel":
        idx = [self.assets.index(a) for a in assets]
        return RatioPanel(tuple(assets), self.quarters, self.values[:, idx, :])

    def before(self, cutoff) -> "RatioPanel":
        """Quarters strictly before ``cutoff``."""
        keep = self.quarters < pd.Timestamp(cutoff)
        return RatioPanel(self.assets, self.quarters[keep], self.values[keep])

    def __eq__(self, other):
        if not isinstance(other, RatioPanel):
            return NotImplemented
        return (
            self.assets == other.assets
            and self.quarters.equals(other.quarters)
            and np.array_equal(self.values, other.values, equal_nan=True)
        )


@dataclass(frozen=True)
class SectorMap:
    mapping: Mapping[str, str]
    sectors: tuple = ()

    def __post_init__(self):
        mapping = dict(self.mapping)
        object.__setattr__(self, "mapping", mapping)
        if not self.sectors:
            object.__setattr__(self, "sectors", tuple(sorted(set(mapping.values()))))
        missing = set(mapping.values()) - set(self.sectors)
        if missing:
            raise DataError(f"sectors not listed: {sorted(missing)}")

    def __getitem__(self, asset) -> str:
        return self.mapping[asset]

    def members(self, sector: str, assets: Optional[Sequence] = None) -> list:
        pool = self.mapping.keys() if assets is None else assets
        return [a for a in pool if self.mapping.get(a) == sector]

    def restrict(self, assets: Sequence) -> "SectorMap":
        missing = [a for a in assets if a not in self.mapping]
        if missing:
            raise DataError(f"assets without a sector: {missing[:5]}")
        return SectorMap({a: self.mapping[a] for a in assets}, self.sectors)

    def counts(self) -> dict:
        out = {s: 0 for s in self.sectors}
        for s in self.mapping.values():
            out[s] += 1
        return out


@dataclass(frozen=True)
class ScenarioSet:
    """Equiprobable (or weighted) return scenarios with a benchmark realization."""

    returns: np.ndarray
    probs: np.ndarray
    benchmark: np.ndarray
    assets: tuple = ()
    asset_sectors: tuple = ()
    sector_benchmarks: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        R = np.atleast_2d(np.array(self.returns, dtype=float))
        p = np.array(self.probs, dtype=float).reshape(-1)
        y = np.array(self.benchmark, dtype=float).reshape(-1)
        T, N = R.shape
        if p.size != T or y.size != T:
            raise LengthMismatch(f"{T} scenarios but {p.size} probabilities and {y.size} benchmark values")
        if not np.all(np.isfinite(R)) or not np.all(np.isfinite(y)):
            raise DataError("scenario returns must be finite")
        if np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-12:
            raise DataError("scenario probabilities must be positive and sum to 1")
        assets = tuple(self.assets) if self.assets else tuple(range(N))
        if len(assets) != N:
            raise LengthMismatch("asset labels do not match return columns")
        if self.asset_sectors and len(self.asset_sectors) != N:
            raise LengthMismatch("asset_sectors does not match return columns")
        for arr in (R, p, y):
            arr.setflags(write=False)
        object.__setattr__(self, "returns", R)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "benchmark", y)
        object.__setattr__(self, "assets", assets)
        object.__setattr__(self, "asset_sectors", tuple(self.asset_sectors))
        object.__setattr__(self, "sector_benchmarks", dict(self.sector_benchmarks))

    @property
    def T(self) -> int:
        return self.returns.shape[0]

    @property
    def N(self) -> int:
        return self.returns.shape[1]

    @property
    def mean_returns(self) -> np.ndarray:
        return self.probs @ self.returns

    @classmethod
    def equiprobable(cls, returns, benchmark, **kw) -> "ScenarioSet":
        T = np.atleast_2d(returns).shape[0]
        return cls(returns, np.full(T, 1.0 / T), benchmark, **kw)

    def sector(self, label: str) -> "ScenarioSet":
        """Sub-scenarios for one sector, benchmarked against that sector's series."""
        idx = [i for i, s in enumerate(self.asset_sectors) if s == label]
        if not idx:
            raise EmptySector(f"sector {label!r} has no assets")
        bench = self.sector_benchmarks.get(label)
        if bench is None:
            bench = self.returns[:, idx].mean(axis=1)
        return ScenarioSet(
            self.returns[:, idx],
            self.probs,
            bench,
            assets=tuple(self.assets[i] for i in idx),
            asset_sectors=tuple(label for _ in idx),
        )

    def sector_indices(self, label: str) -> np.ndarray:
        return np.array([i for i, s in enumerate(self.asset_sectors) if s == label], dtype=int)


# ------------------------------------------------------------------- loading


def _read_csv(path, required: Sequence[str]) -> pd.DataFrame:
    path = Path(path)
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        raise DataError(f"{path}: file not found") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from None
    df.columns = [c.strip() for c in df.columns]
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise DataError(f"{path}: missing column(s) {missing}; header is {list(df.columns)}")
    return df


def _parse_dates(df, col, path) -> pd.Series:
    parsed = pd.to_datetime(df[col].str.strip(), format="ISO8601", errors="coerce")
    bad = parsed.isna()
    if bad.any():
        i = int(np.flatnonzero(bad.to_numpy())[0])
        raise DataError(f"{path}:{i + 2}: cannot parse {col} {df[col].iloc[i]!r}")
    return parsed


def _to_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        return float("nan")


def _parse_numbers(df, col, path, allow_empty=False) -> pd.Series:
    raw = df[col].str.strip()
    # float() rounds correctly; pandas' fast parser can be off by an ulp
    parsed = pd.Series([_to_float(v) for v in raw], index=raw.index, dtype=float)
    bad = parsed.isna() & ~(allow_empty & (raw == ""))
    bad |= np.isinf(parsed.to_numpy(dtype=float, na_value=0.0))
    if bad.any():
        i = int(np.flatnonzero(bad.to_numpy())[0])
        raise DataError(f"{path}:{i + 2}: cannot parse {col} {df[col].iloc[i]!r}")
    return parsed


def _no_duplicates(df, keys, path):
    dup = df.duplicated(subset=keys, keep="first")
    if dup.any():
        i = int(np.flatnonzero(dup.to_numpy())[0])
        raise DataError(f"{path}:{i + 2}: duplicate entry for {tuple(df[k].iloc[i] for k in keys)}")


def load_prices(path) -> PricePanel:
    """Long-format ``date,asset_id,close`` CSV; absent rows are missing cells."""
    df = _read_csv(path, ["date", "asset_id", "close"])
    df["date"] = _parse_dates(df, "date", path)
    df["asset_id"] = df["asset_id"].str.strip()
    df["close"] = _parse_numbers(df, "close", path, allow_empty=True)
    _no_duplicates(df, ["date", "asset_id"], path)
    if df.empty:
        raise EmptyUniverse(f"{path}: no price rows")
    wide = df.pivot(index="date", columns="asset_id", values="close").sort_index()
    wide = wide[sorted(wide.columns)]
    return PricePanel.from_frame(wide)


def load_ratios(path) -> RatioPanel:
    """Long-format ``quarter_end,asset_id,ratio_label,value`` CSV."""
    df = _read_csv(path, ["quarter_end", "asset_id", "ratio_label", "value"])
    df["quarter_end"] = _parse_dates(df, "quarter_end", path)
    df["asset_id"] = df["asset_id"].str.strip()
    df["ratio_label"] = df["ratio_label"].str.strip().str.upper()
    unknown = ~df["ratio_label"].isin(LABELS)
    if unknown.any():
        i = int(np.flatnonzero(unknown.to_numpy())[0])
        raise DataError(f"{path}:{i + 2}: unknown ratio label {df['ratio_label'].iloc[i]!r}")
    df["value"] = _parse_numbers(df, "value", path, allow_empty=True)
    _no_duplicates(df, ["quarter_end", "asset_id", "ratio_label"], path)
    if df.empty:
        raise NoRatioData(f"{path}: no ratio rows")
    quarters = pd.DatetimeIndex(sorted(df["quarter_end"].unique()))
    assets = tuple(sorted(df["asset_id"].unique()))
    values = np.full((len(quarters), len(assets), len(LABELS)), np.nan)
    qi = quarters.get_indexer(df["quarter_end"])
    ai = pd.Index(assets).get_indexer(df["asset_id"])
    ri = pd.Index(LABELS).get_indexer(df["ratio_label"])
    values[qi, ai, ri] = df["value"].to_numpy(dtype=float)
    return RatioPanel(assets, quarters, values)


def load_sectors(path) -> SectorMap:
    df = _read_csv(path, ["asset_id", "sector"])
    df["asset_id"] = df["asset_id"].str.strip()
    df["sector"] = df["sector"].str.strip()
    empty = (df["asset_id"] == "") | (df["sector"] == "")
    if empty.any():
        i = int(np.flatnonzero(empty.to_numpy())[0])
        raise DataError(f"{path}:{i + 2}: empty asset_id or sector")
    _no_duplicates(df, ["asset_id"], path)
    return SectorMap(dict(zip(df["asset_id"], df["sector"])))


def load_benchmark(path) -> pd.Series:
    """Benchmark weekly returns indexed by date.

    Accepts ``date,index_level`` (converted to simple returns, first date
    dropped) or ``date,return``.
    """
    df = _read_csv(path, ["date"])
    df["date"] = _parse_dates(df, "date", path)
    if "index_level" in df.columns:
        level = _parse_numbers(df, "index_level", path)
        s = pd.Series(level.to_numpy(dtype=float), index=df["date"]).sort_index()
        if (s <= 0).any():
            raise NonPositivePrice(f"{path}: non-positive index level")
        out = s.pct_change().iloc[1:]
    elif "return" in df.columns:
        ret = _parse_numbers(df, "return", path)
        out = pd.Series(ret.to_numpy(dtype=float), index=df["date"]).sort_index()
    else:
        raise DataError(f"{path}: need an index_level or return column")
    if out.index.has_duplicates:
        raise DataError(f"{path}: duplicate dates")
    out.name = "benchmark"
    return out


def write_prices(panel: PricePanel, path, float_format: str = "%.17g") -> None:
    long = panel.frame().rename_axis("date").reset_index().melt(
        id_vars="date", var_name="asset_id", value_name="close"
    )
    long = long.dropna(subset=["close"]).sort_values(["date", "asset_id"], kind="stable")
    long["date"] = long["date"].dt.strftime("%Y-%m-%d")
    long.to_csv(path, index=False, float_format=float_format)


def write_ratios(panel: RatioPanel, path, float_format: str = "%.17g") -> None:
    q, a, r = np.nonzero(~np.isnan(panel.values))
    df = pd.DataFrame(
        {
            "quarter_end": panel.quarters[q].strftime("%Y-%m-%d"),
            "asset_id": np.asarray(panel.assets, dtype=object)[a],
            "ratio_label": np.asarray(LABELS, dtype=object)[r],
            "value": panel.values[q, a, r],
        }
    )
    df.to_csv(path, index=False, float_format=float_format)


def write_sectors(sectors: SectorMap, path) -> None:
    pd.DataFrame(
        {"asset_id": list(sectors.mapping), "sector": list(sectors.mapping.values())}
    ).to_csv(path, index=False)


# ------------------------------------------------------------------ returns


def compute_returns(prices: PricePanel) -> np.ndarray:
    """Simple weekly returns ``(p_t - p_{t-1}) / p_{t-1}``, one row fewer than prices."""
    P = prices.prices
    if np.isnan(P).any():
        w, j = np.argwhere(np.isnan(P))[0]
        raise GapRemaining(f"missing price for {prices.assets[j]} on {prices.dates[w].date()}")
    if np.any(P <= 0):
        w, j = np.argwhere(P <= 0)[0]
        raise NonPositivePrice(f"price {P[w, j]} for {prices.assets[j]} on {prices.dates[w].date()}")
    return (P[1:] - P[:-1]) / P[:-1]


# ----------------------------------------------------------------- cleaning


@dataclass
class CleaningReport:
    removed: list = field(default_factory=list)  # (asset, reason)
    price_cells_filled: int = 0
    ratio_cells_filled: int = 0

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.removed, columns=["asset_id", "reason"])


def missing_price_quarters(prices: PricePanel) -> dict:
    """Per asset, the number of calendar quarters with no observed price."""
    periods = prices.dates.to_period("Q")
    full = pd.period_range(periods.min(), periods.max(), freq="Q")
    observed = pd.DataFrame(~np.isnan(prices.prices), index=periods, columns=list(prices.assets))
    per_q = observed.groupby(level=0).any().reindex(full, fill_value=False)
    return {a: int((~per_q[a]).sum()) for a in prices.assets}


def missing_ratio_quarters(ratios: RatioPanel) -> dict:
    """Per asset, the number of quarters in which any ratio is missing."""
    incomplete = np.isnan(ratios.values).any(axis=2)
    return {a: int(incomplete[:, i].sum()) for i, a in enumerate(ratios.assets)}


def clean_universe(prices: PricePanel, ratios: RatioPanel, sectors: Optional[SectorMap] = None):
    """Drop assets with too much missing data and fill the gaps that remain.

    Returns ``(prices, ratios, report)``; both panels cover the same assets in
    price-panel order.
    """
    report = CleaningReport()
    price_missing = missing_price_quarters(prices)
    ratio_missing = missing_ratio_quarters(ratios)
    keep = []
    for a in prices.assets:
        if a not in ratios.assets:
            report.removed.append((a, "absent from ratio data"))
        elif price_missing[a] > MAX_MISSING_PRICE_QUARTERS:
            report.removed.append((a, f"prices missing in {price_missing[a]} quarters"))
        elif ratio_missing[a] > MAX_MISSING_RATIO_QUARTERS:
            report.removed.append((a, f"ratios missing in {ratio_missing[a]} quarters"))
        elif sectors is not None and a not in sectors.mapping:
            report.removed.append((a, "no sector assignment"))
        else:
            ai = ratios.assets.index(a)
            dead = np.all(np.isnan(ratios.values[:, ai, :]), axis=0)
            if dead.any():
                report.removed.append((a, f"{LABELS[int(np.argmax(dead))]} never reported"))
            else:
                keep.append(a)
    for a in ratios.assets:
        if a not in prices.assets:
            report.removed.append((a, "absent from price data"))
    for a, reason in report.removed:
        log.info("removing %s: %s", a, reason)
    if not keep:
        raise EmptyUniverse("every asset was removed during cleaning")
    if sectors is not None:
        empty = [s for s in sectors.sectors if not sectors.members(s, keep)]
        if empty:
            raise EmptySector(f"sector(s) left without assets: {empty}")

    wide = prices.subset(keep).frame()
    before = int(wide.isna().to_numpy().sum())
    wide = wide.interpolate(method="linear", limit_area="inside").ffill().bfill()
    report.price_cells_filled = before - int(wide.isna().to_numpy().sum())
    clean_prices = PricePanel.from_frame(wide)

    rp = ratios.subset(keep)
    vals = rp.values.copy()
    report.ratio_cells_filled = int(np.isnan(vals).sum())
    for i in range(vals.shape[1]):
        block = pd.DataFrame(vals[:, i, :]).ffill().bfill()
        vals[:, i, :] = block.to_numpy()
    clean_ratios = RatioPanel(rp.assets, rp.quarters, vals)
    return clean_prices, clean_ratios, report


# ---------------------------------------------------------------- scenarios


def _window_slice(window, total: int) -> slice:
    if isinstance(window, range):
        if window.step != 1:
            raise WindowOutOfRange("window must be contiguous")
        window = slice(window.start, window.stop)
    elif isinstance(window, tuple):
        window = slice(*window)
    start, stop = window.start or 0, total if window.stop is None else window.stop
    if start < 0 or stop > total or stop <= start:
        raise WindowOutOfRange(f"window [{start}, {stop}) outside [0, {total})")
    return slice(start, stop)


def make_scenarios(
    returns: np.ndarray,
    window,
    benchmark: Optional[np.ndarray] = None,
    benchmark_mode: str = "auto",
    assets: Sequence = (),
    sectors: Optional[SectorMap] = None,
    sector_benchmarks: Optional[Mapping[str, np.ndarray]] = None,
) -> ScenarioSet:
    """Equiprobable scenarios over ``window`` rows of the full return matrix.

    ``benchmark_mode``: ``index`` uses the supplied series, ``proxy`` the
    equal-weighted asset mean, ``auto`` the index when one is given.
    """
    R = np.asarray(returns, dtype=float)
    sl = _window_slice(window, R.shape[0])
    Rw = R[sl]
    if benchmark_mode not in ("auto", "index", "proxy"):
        raise ValueError(f"unknown benchmark_mode {benchmark_mode!r}")
    use_index = benchmark is not None and benchmark_mode != "proxy"
    if benchmark_mode == "index" and benchmark is None:
        raise DataError("benchmark_mode 'index' needs a benchmark series")
    if use_index:
        b = np.asarray(benchmark, dtype=float)
        if b.shape[0] != R.shape[0]:
            raise LengthMismatch(f"benchmark has {b.shape[0]} rows, returns have {R.shape[0]}")
        y = b[sl]
    else:
        y = Rw.mean(axis=1)
    asset_sectors = ()
    sector_bench = {}
    if sectors is not None:
        if not assets:
            raise DataError("asset labels are needed to attach sectors")
        asset_sectors = tuple(sectors[a] for a in assets)
        for s in sectors.sectors:
            idx = [i for i, lab in enumerate(asset_sectors) if lab == s]
            if not idx:
                continue
            supplied = None if sector_benchmarks is None else sector_benchmarks.get(s)
            if supplied is not None and benchmark_mode != "proxy":
                sector_bench[s] = np.asarray(supplied, dtype=float)[sl]
            else:
                sector_bench[s] = Rw[:, idx].mean(axis=1)
    T = Rw.shape[0]
    return ScenarioSet(
        Rw, np.full(T, 1.0 / T), y, assets=tuple(assets), asset_sectors=asset_sectors,
        sector_benchmarks=sector_bench,
    )


# ------------------------------------------------------------------- ratios


def ratio_snapshot(ratios: RatioPanel, as_of, lookback_quarters: int = 4) -> np.ndarray:
    """Trailing mean of each ratio over the last ``lookback_quarters`` reports at or before ``as_of``.

    Returns an ``asset x ratio`` matrix. With fewer quarters on record the
    mean covers what exists.
    """
    if lookback_quarters < 1:
        raise ValueError("lookback_quarters must be >= 1")
    mask = ratios.quarters <= pd.Timestamp(as_of)
    if not mask.any():
        raise NoRatioData(f"no ratio quarter at or before {pd.Timestamp(as_of).date()}")
    hist = ratios.values[mask]
    out = np.empty(hist.shape[1:])
    for a in range(hist.shape[1]):
        for r in range(hist.shape[2]):
            col = hist[:, a, r]
            col = col[~np.isnan(col)]
            if col.size == 0:
                raise NoRatioData(
                    f"{ratios.assets[a]} has no {LABELS[r]} value at or before {pd.Timestamp(as_of).date()}"
                )
            out[a, r] = col[-lookback_quarters:].mean()
    return out


def align_quarters(quarters: pd.DatetimeIndex, dates: pd.DatetimeIndex) -> np.ndarray:
    """Index of the last weekly date on or before each quarter end (-1 if none)."""
    return np.searchsorted(dates.asi8, pd.DatetimeIndex(quarters).asi8, side="right") - 1


@dataclass(frozen=True)
class MarketData:
    """A cleaned, aligned dataset ready for backtesting."""

    prices: PricePanel
    ratios: RatioPanel
    sectors: SectorMap
    benchmark: Optional[pd.Series] = None
    report: Optional[CleaningReport] = None

    @property
    def assets(self) -> tuple:
        return self.prices.assets

    @property
    def returns(self) -> np.ndarray:
        return compute_returns(self.prices)

    @property
    def return_dates(self) -> pd.DatetimeIndex:
        return self.prices.dates[1:]

    def benchmark_returns(self) -> Optional[np.ndarray]:
        """Benchmark aligned to return dates; None when absent."""
        if self.benchmark is None:
            return None
        aligned = self.benchmark.reindex(self.return_dates)
        if aligned.isna().any():
            first = aligned.index[aligned.isna().to_numpy()][0]
            raise GapRemaining(f"benchmark has no return for {first.date()}")
        return aligned.to_numpy(dtype=float)


def load_market_data(prices, ratios, sectors, benchmark=None) -> MarketData:
    """Load the CSVs at the given paths and clean the universe."""
    price_panel = load_prices(prices)
    ratio_panel = load_ratios(ratios)
    sector_map = load_sectors(sectors)
    bench = load_benchmark(benchmark) if benchmark else None
    price_panel, ratio_panel, report = clean_universe(price_panel, ratio_panel, sector_map)
    return MarketData(price_panel, ratio_panel, sector_map.restrict(price_panel.assets), bench, report)
