"""Rolling-window and market-phase backtests.

Each window fits every configured model on its training slice, holds the
weights fixed, and records the portfolio's returns over the test slice.
Test series are concatenated in window order (overlapping test slices are
kept as they are).
"""

from __future__ import annotations

import hashlib
import json
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from . import kernels
from .config import RunConfig
from .data import MarketData, RatioPanel, SectorMap, make_scenarios, ratio_snapshot
from .errors import DataTooShort, PhaseOutOfRange, SsdfolioError
from .metrics import compute_metrics, metrics_table
from .pca import RatioObservationMatrix, extract_a, extract_b, fssd_ratio_weights, pca
from .ratios import SPO_FIXED
from .ssd import (
    ModelPortfolio,
    solve_fssd,
    solve_nominal_ssd,
    solve_spo,
    verify_ssd_dominance,
)
from .variance import CovarianceEstimate, solve_mean_var, solve_min_var

log = logging.getLogger(__name__)

SSD_FAMILY = ("SSD", "F-SSD", "SPO", "PCA-SPO-A", "PCA-SPO-B")


# ------------------------------------------------------------------ windows


@dataclass(frozen=True)
class Window:
    id: str
    train: range
    test: range


@dataclass(frozen=True)
class WindowPlan:
    in_len: int
    out_len: int
    step: int
    windows: tuple

    def __len__(self):
        return len(self.windows)


def plan_windows(total_weeks: int, in_len: int = 52, out_len: int = 13, step: int = 4) -> WindowPlan:
    """Windows over ``total_weeks`` return rows; window w starts at row ``w * step``."""
    if total_weeks < in_len + out_len:
        raise DataTooShort(f"{total_weeks} weeks cannot hold {in_len} + {out_len}")
    count = (total_weeks - in_len - out_len) // step + 1
    windows = tuple(
        Window(str(w), range(w * step, w * step + in_len), range(w * step + in_len, w * step + in_len + out_len))
        for w in range(count)
    )
    return WindowPlan(in_len, out_len, step, windows)


@dataclass(frozen=True)
class Phase:
    name: str
    start: pd.Timestamp
    end: pd.Timestamp


def phase_window(phase: Phase, return_dates: pd.DatetimeIndex, in_len: int = 52) -> Window:
    """Test rows inside the phase's date range, trained on the ``in_len`` rows before it."""
    inside = np.flatnonzero((return_dates >= phase.start) & (return_dates <= phase.end))
    if inside.size == 0:
        raise PhaseOutOfRange(f"phase {phase.name}: no return dates in {phase.start.date()}..{phase.end.date()}")
    first, last = int(inside[0]), int(inside[-1])
    if first < in_len:
        raise PhaseOutOfRange(f"phase {phase.name}: only {first} weeks before it, need {in_len}")
    return Window(phase.name, range(first - in_len, first), range(first, last + 1))


# -------------------------------------------------------------- extraction


@dataclass(frozen=True)
class Extractions:
    """Dominant ratios per sector (both rules) and the blended-objective terms."""

    rule_a: dict
    rule_b: dict
    fssd_terms: tuple
    solutions: dict = field(default_factory=dict)


def compute_extractions(ratios: RatioPanel, sectors: SectorMap, assets: Sequence, until,
                        mode: str = "correlation", variance_target: float = 0.80,
                        component_cap: int = 4) -> Extractions:
    """PCA per sector and on all assets, using ratio quarters strictly before ``until``."""
    solutions: dict = {}
    rule_a, rule_b = {}, {}
    for s in sectors.sectors:
        members = sectors.members(s, assets)
        X = RatioObservationMatrix.from_panel(ratios, members, s, until)
        sol = pca(X, mode, variance_target, component_cap)
        solutions[s] = sol
        rule_a[s] = extract_a(sol).labels
        rule_b[s] = extract_b(sol).labels
    X = RatioObservationMatrix.from_panel(ratios, list(assets), "ALL", until)
    sol_all = pca(X, mode, variance_target, component_cap)
    solutions["ALL"] = sol_all
    return Extractions(rule_a, rule_b, fssd_ratio_weights(sol_all), solutions)


# ------------------------------------------------------------------ fitting


@dataclass(frozen=True)
class BacktestData:
    """Arrays the window fits read from."""

    assets: tuple
    returns: np.ndarray
    return_dates: pd.DatetimeIndex
    benchmark: Optional[np.ndarray]
    ratios: RatioPanel
    sectors: SectorMap

    @classmethod
    def from_market(cls, data: MarketData) -> "BacktestData":
        return cls(data.assets, data.returns, data.return_dates, data.benchmark_returns(), data.ratios,
                   data.sectors)

    def with_returns(self, returns: np.ndarray) -> "BacktestData":
        return BacktestData(self.assets, returns, self.return_dates, self.benchmark, self.ratios, self.sectors)


def default_extraction_cutoff(data: BacktestData, cfg: RunConfig):
    if cfg.extraction_until:
        return pd.Timestamp(cfg.extraction_until)
    # history strictly before the first price date
    return data.return_dates[0] - pd.Timedelta(days=7)


def _sector_weights(cfg: RunConfig, sectors: Sequence[str]) -> Optional[dict]:
    if not cfg.sector_weights:
        return None
    return {s: [float(w) for w in cfg.sector_weights[s]] for s in sectors if s in cfg.sector_weights}


def fit_models(data: BacktestData, train: range, cfg: RunConfig, extractions: Optional[Extractions]) -> dict:
    """Fit every configured model on one training slice.

    Returns ``{model: ModelPortfolio or error message}``; only the training
    rows of ``data.returns`` are read.
    """
    scen = make_scenarios(data.returns, train, data.benchmark, cfg.benchmark_mode, data.assets, data.sectors)
    as_of = data.return_dates[train.stop - 1]
    snapshot = None
    if any(m in ("F-SSD", "SPO", "PCA-SPO-A", "PCA-SPO-B") for m in cfg.models):
        snapshot = ratio_snapshot(data.ratios.subset(data.assets), as_of, cfg.lookback_quarters)
        if cfg.extraction_refresh:
            extractions = compute_extractions(data.ratios, data.sectors, data.assets, as_of + pd.Timedelta(days=1),
                                              cfg.pca_mode, cfg.variance_target, cfg.component_cap)
    sectors_present = list(dict.fromkeys(scen.asset_sectors))
    weights = _sector_weights(cfg, sectors_present)
    out: dict = {}
    for model in cfg.models:
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                out[model] = _fit_one(model, scen, snapshot, extractions, weights, cfg)
            for w in caught:
                log.warning("%s: %s", model, w.message)
        except (SsdfolioError, np.linalg.LinAlgError) as exc:
            out[model] = f"{type(exc).__name__}: {exc}"
    return out


def _fit_one(model, scen, snapshot, ext, weights, cfg: RunConfig) -> ModelPortfolio:
    kw = dict(bound=cfg.bound, formulation=cfg.formulation)
    if model == "SSD":
        return solve_nominal_ssd(scen, **kw)
    if model == "F-SSD":
        return solve_fssd(scen, snapshot, ext.fssd_terms, cfg.alpha, standardize=cfg.standardize, **kw)
    if model in ("SPO", "PCA-SPO-A", "PCA-SPO-B"):
        sectors = list(dict.fromkeys(scen.asset_sectors))
        if model == "SPO":
            labels = {s: SPO_FIXED for s in sectors}
        else:
            labels = ext.rule_a if model == "PCA-SPO-A" else ext.rule_b
        return solve_spo(scen, snapshot, labels, weights, standardize=cfg.standardize, model=model, **kw)
    cov = CovarianceEstimate.from_scenarios(scen)
    if model == "MinVar":
        return solve_min_var(cov, cfg.bound)
    if model == "MeanVar":
        return solve_mean_var(cov, cfg.bound)
    raise ValueError(f"unknown model {model!r}")


@dataclass
class WindowResult:
    window: Window
    fits: dict  # model -> ModelPortfolio or error message
    test_returns: dict  # model -> np.ndarray
    audits: dict  # model -> (worst_gap, dominates)


def run_window(data: BacktestData, cfg: RunConfig, extractions: Optional[Extractions], window: Window) -> WindowResult:
    fits = fit_models(data, window.train, cfg, extractions)
    test = data.returns[window.test.start:window.test.stop]
    returns, audits = {}, {}
    scen = None
    for model, fit in fits.items():
        if isinstance(fit, str):
            log.warning("window %s, %s skipped: %s", window.id, model, fit)
            continue
        returns[model] = test @ fit.weights
        if scen is None:
            scen = make_scenarios(data.returns, window.train, data.benchmark, cfg.benchmark_mode, data.assets)
        chk = verify_ssd_dominance(fit.weights, scen)
        audits[model] = (chk.worst_gap, chk.dominates)
    return WindowResult(window, fits, returns, audits)


# ------------------------------------------------------------------- report


def downside_pattern(series) -> np.ndarray:
    """Ascending sort followed by running sums."""
    x = np.asarray(series, dtype=float).reshape(-1)
    if x.size == 0:
        raise ValueError("empty series")
    return np.cumsum(np.sort(x))


@dataclass
class ModelSeries:
    window_ids: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    returns: list = field(default_factory=list)
    dates: list = field(default_factory=list)

    @property
    def series(self) -> np.ndarray:
        return np.concatenate(self.returns) if self.returns else np.zeros(0)


@dataclass
class BacktestReport:
    label: str
    models: tuple
    assets: tuple
    windows: tuple
    out_len: int
    per_model: dict
    metrics: dict
    skipped: list  # (window_id, model, reason)
    dominance: list  # (window_id, model, worst_gap, dominates)
    extractions: Optional[Extractions] = None

    def series(self, model: str) -> np.ndarray:
        return self.per_model[model].series

    def cumulative(self, model: str) -> np.ndarray:
        return np.cumsum(self.series(model))

    def downside(self, model: str) -> np.ndarray:
        s = self.series(model)
        return downside_pattern(s) if s.size else s

    def weights_frame(self) -> pd.DataFrame:
        rows = []
        for model in self.models:
            ms = self.per_model[model]
            for wid, z in zip(ms.window_ids, ms.weights):
                rows.extend((wid, model, a, float(w)) for a, w in zip(self.assets, z))
        return pd.DataFrame(rows, columns=["window_id", "model", "asset_id", "weight"])

    @property
    def all_failed(self) -> bool:
        return all(not self.per_model[m].window_ids for m in self.models)


def _assemble(label, results: Sequence[WindowResult], cfg: RunConfig, data: BacktestData,
              extractions, out_len) -> BacktestReport:
    per_model = {m: ModelSeries() for m in cfg.models}
    skipped, dominance = [], []
    for res in results:
        dates = data.return_dates[res.window.test.start:res.window.test.stop]
        for model in cfg.models:
            fit = res.fits[model]
            if isinstance(fit, str):
                skipped.append((res.window.id, model, fit))
                continue
            ms = per_model[model]
            ms.window_ids.append(res.window.id)
            ms.weights.append(fit.weights)
            ms.returns.append(res.test_returns[model])
            ms.dates.append(dates)
            gap, ok = res.audits[model]
            dominance.append((res.window.id, model, gap, ok))
    metrics = {}
    for model in cfg.models:
        s = per_model[model].series
        if s.size:
            metrics[model] = compute_metrics(s, cfg.rf, cfg.divisor, cfg.levels)
    return BacktestReport(label, tuple(cfg.models), data.assets, tuple(r.window for r in results), out_len,
                          per_model, metrics, skipped, dominance, extractions)


def _map_windows(data, cfg, extractions, windows, jobs: int):
    fn = partial(run_window, data, cfg, extractions)
    if jobs > 1 and len(windows) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, windows))  # results come back in window order
    return [fn(w) for w in windows]


def _extractions_for(data: BacktestData, cfg: RunConfig) -> Optional[Extractions]:
    needs = any(m in ("F-SSD", "PCA-SPO-A", "PCA-SPO-B") for m in cfg.models)
    if not needs:
        return None
    return compute_extractions(data.ratios, data.sectors, data.assets, default_extraction_cutoff(data, cfg),
                               cfg.pca_mode, cfg.variance_target, cfg.component_cap)


def run_rolling(cfg: RunConfig, data: BacktestData, jobs: int = 1,
                extractions: Optional[Extractions] = None) -> BacktestReport:
    plan = plan_windows(data.returns.shape[0], cfg.in_len, cfg.out_len, cfg.step)
    if extractions is None:
        extractions = _extractions_for(data, cfg)
    log.info("rolling backtest: %d windows, models %s", len(plan), ", ".join(cfg.models))
    results = _map_windows(data, cfg, extractions, plan.windows, jobs)
    return _assemble("rolling", results, cfg, data, extractions, cfg.out_len)


def run_phases(cfg: RunConfig, data: BacktestData, phases: Optional[Sequence[Phase]] = None, jobs: int = 1,
               extractions: Optional[Extractions] = None) -> dict:
    """One fit per phase on the ``in_len`` weeks before it; a report per phase."""
    if phases is None:
        phases = [Phase(p.name, pd.Timestamp(p.start), pd.Timestamp(p.end)) for p in cfg.phases]
    if not phases:
        return {}
    windows = [phase_window(p, data.return_dates, cfg.in_len) for p in phases]
    if extractions is None:
        extractions = _extractions_for(data, cfg)
    results = _map_windows(data, cfg, extractions, windows, jobs)
    return {
        w.id: _assemble(w.id, [r], cfg, data, extractions, len(w.test)) for w, r in zip(windows, results)
    }


# ------------------------------------------------------------------- output


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _csv(df: pd.DataFrame, path: Path) -> None:
    df.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def write_report(report: BacktestReport, out_dir, cfg: RunConfig, inputs: Optional[Mapping[str, str]] = None) -> Path:
    """Write the report bundle; returns the directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table = metrics_table(report.metrics) if report.metrics else pd.DataFrame()
    table.reset_index().to_csv(out / "metrics.csv", index=False, lineterminator="\n")
    _csv(report.weights_frame(), out / "weights.csv")
    for model in report.models:
        ms = report.per_model[model]
        wids = [wid for wid, r in zip(ms.window_ids, ms.returns) for _ in r]
        dates = [d.strftime("%Y-%m-%d") for ds in ms.dates for d in ds]
        s = ms.series
        _csv(pd.DataFrame({"window_id": wids, "date": dates, "return": s}), out / f"returns_{model}.csv")
        _csv(pd.DataFrame({"step": np.arange(1, s.size + 1), "cumulative_return": np.cumsum(s)}),
             out / f"cumulative_{model}.csv")
        down = downside_pattern(s) if s.size else s
        _csv(pd.DataFrame({"rank": np.arange(1, s.size + 1), "cumulative_sorted_return": down}),
             out / f"downside_{model}.csv")
    _csv(pd.DataFrame(report.skipped, columns=["window_id", "model", "reason"]), out / "skipped.csv")
    _csv(pd.DataFrame(report.dominance, columns=["window_id", "model", "worst_gap", "dominates"]),
         out / "dominance.csv")
    if report.extractions is not None:
        ext = report.extractions
        rows = [[s, "A", *ext.rule_a[s]] for s in ext.rule_a] + [[s, "B", *ext.rule_b[s]] for s in ext.rule_b]
        pd.DataFrame(rows, columns=["sector", "rule", "R1", "R2", "R3", "R4"]).to_csv(
            out / "extraction.csv", index=False, lineterminator="\n")
        _csv(pd.DataFrame([(t.label, t.weight, t.sign) for t in ext.fssd_terms],
                          columns=["ratio", "weight", "sign"]), out / "fssd_terms.csv")
    manifest = {
        "config": cfg.to_dict(),
        "inputs": {k: {"path": v, "sha256": file_sha256(v)} for k, v in sorted((inputs or {}).items()) if v},
        "report": report.label,
        "windows": len(report.windows),
        "series_length": {m: int(report.per_model[m].series.size) for m in report.models},
        "skipped": len(report.skipped),
        "kernel_backend": kernels.BACKEND,
    }
    (out / "run_manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return out


def load_weights(path) -> pd.DataFrame:
    df = pd.read_csv(path, dtype={"window_id": str, "model": str, "asset_id": str})
    missing = {"window_id", "model", "asset_id", "weight"} - set(df.columns)
    if missing:
        raise SsdfolioError(f"{path}: missing column(s) {sorted(missing)}")
    return df
