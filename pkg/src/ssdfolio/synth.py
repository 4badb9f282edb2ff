"""Synthetic market data in the ingestion formats.

Weekly returns follow a market factor plus one factor per sector. Ratios
are driven by one latent AR(1) walk per (asset, category) so that ratios
in the same category move together, which gives PCA something to find.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .data import PricePanel, RatioPanel, SectorMap, write_prices, write_ratios, write_sectors
from .errors import ConfigError, FeasibilityWarning
from .ratios import RATIOS, Category

# (typical level, relative spread) per ratio
RATIO_LEVELS = {
    "QR": (1.0, 0.35), "CR": (1.5, 0.35), "CCL": (0.4, 0.5),
    "NPM": (0.08, 0.06), "ROA": (0.06, 0.04), "CPTI": (0.10, 0.06), "ROE": (0.14, 0.08),
    "DER": (0.8, 0.45), "DAR": (0.4, 0.3),
    "PER": (20.0, 0.35), "PBR": (3.0, 0.4),
}


@dataclass
class SyntheticSpec:
    n_assets: int = 24
    n_sectors: int = 6
    weeks: int = 200
    seed: int = 42
    start: str = "2014-04-04"
    history_quarters: int = 40
    drift: float = 0.0015
    market_vol: float = 0.018
    sector_vol: float = 0.012
    idio_vol: float = 0.022
    ratio_persistence: float = 0.8
    ratio_noise: float = 0.35
    # (first week, stop week, weekly drift) overrides, e.g. a bearish stretch
    regimes: list = field(default_factory=list)

    def validate(self, bound: float = 0.3) -> None:
        if self.n_assets < 1 or self.n_sectors < 1 or self.n_sectors > self.n_assets:
            raise ConfigError("need at least one asset per sector")
        if self.weeks < 2:
            raise ConfigError("need at least two weeks of prices")
        smallest = self.n_assets // self.n_sectors
        need = math.ceil(1.0 / bound - 1e-12)
        if smallest < need:
            warnings.warn(
                f"{self.n_assets} assets over {self.n_sectors} sectors leaves sectors of {smallest}; "
                f"a cap of {bound} needs {need} per sector",
                FeasibilityWarning,
                stacklevel=2,
            )


@dataclass
class SyntheticData:
    prices: PricePanel
    ratios: RatioPanel
    sectors: SectorMap
    benchmark_level: pd.Series


def generate(spec: SyntheticSpec) -> SyntheticData:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    N, S, W = spec.n_assets, spec.n_sectors, spec.weeks
    assets = tuple(f"A{j + 1:03d}" for j in range(N))
    sector_names = tuple(f"S{s + 1}" for s in range(S))
    groups = np.array_split(np.arange(N), S)
    sector_of = np.empty(N, dtype=int)
    for s, members in enumerate(groups):
        sector_of[members] = s

    dates = pd.date_range(pd.Timestamp(spec.start), periods=W, freq="W-FRI")
    beta = rng.uniform(0.6, 1.4, N)
    gamma = rng.uniform(0.5, 1.2, N)
    alpha = rng.normal(0.0, 0.001, N)
    drift = np.full(W - 1, spec.drift)
    for first, stop, value in spec.regimes:
        drift[max(0, first - 1):max(0, stop - 1)] = value
    market = rng.normal(0.0, spec.market_vol, W - 1)
    sector_f = rng.normal(0.0, spec.sector_vol, (W - 1, S))
    idio = rng.normal(0.0, spec.idio_vol, (W - 1, N))
    log_ret = drift[:, None] + alpha + market[:, None] * beta + sector_f[:, sector_of] * gamma + idio
    p0 = rng.uniform(20.0, 200.0, N)
    prices = np.empty((W, N))
    prices[0] = p0
    prices[1:] = p0 * np.exp(np.cumsum(log_ret, axis=0))
    price_panel = PricePanel(assets, dates, prices)

    # equal-weight index rebalanced weekly, built from the same prices
    simple = (prices[1:] - prices[:-1]) / prices[:-1]
    level = np.empty(W)
    level[0] = 1000.0
    level[1:] = 1000.0 * np.cumprod(1.0 + simple.mean(axis=1))
    benchmark = pd.Series(level, index=dates, name="index_level")

    first_q = (dates[0] - pd.offsets.QuarterEnd(spec.history_quarters)).normalize()
    quarters = pd.date_range(first_q, dates[-1], freq="QE")
    Q = len(quarters)
    cats = [Category.LR, Category.PR, Category.SR, Category.VR]
    latent = np.zeros((Q, N, len(cats)))
    sector_tilt = rng.normal(0.0, 0.6, (S, len(cats)))
    latent[0] = rng.normal(0.0, 1.0, (N, len(cats))) + sector_tilt[sector_of]
    phi = spec.ratio_persistence
    for q in range(1, Q):
        shock = rng.normal(0.0, math.sqrt(1 - phi ** 2), (N, len(cats)))
        latent[q] = phi * latent[q - 1] + (1 - phi) * sector_tilt[sector_of] + shock
    load = rng.uniform(0.6, 1.0, (len(RATIOS),))
    values = np.empty((Q, N, len(RATIOS)))
    for r, m in enumerate(RATIOS):
        level_r, spread = RATIO_LEVELS[m.label]
        c = cats.index(m.category)
        x = load[r] * latent[:, :, c] + spec.ratio_noise * rng.normal(0.0, 1.0, (Q, N))
        if m.category is Category.PR:
            values[:, :, r] = level_r + spread * x  # may go negative
        else:
            values[:, :, r] = level_r * np.exp(spread * x)
    ratio_panel = RatioPanel(assets, quarters, values)
    sectors = SectorMap({a: sector_names[sector_of[j]] for j, a in enumerate(assets)}, sector_names)
    return SyntheticData(price_panel, ratio_panel, sectors, benchmark)


def write_synthetic(spec: SyntheticSpec, out_dir) -> dict:
    """Write prices/ratios/sectors/benchmark CSVs; returns the file paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = generate(spec)
    paths = {
        "prices": out / "prices.csv",
        "ratios": out / "ratios.csv",
        "sectors": out / "sectors.csv",
        "benchmark": out / "benchmark.csv",
    }
    write_prices(data.prices, paths["prices"], float_format="%.17g")
    write_ratios(data.ratios, paths["ratios"], float_format="%.17g")
    write_sectors(data.sectors, paths["sectors"])
    bench = data.benchmark_level.rename_axis("date").reset_index()
    bench["date"] = bench["date"].dt.strftime("%Y-%m-%d")
    bench.to_csv(paths["benchmark"], index=False, float_format="%.17g")
    return {k: str(v) for k, v in paths.items()}
