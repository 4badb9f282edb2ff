import numpy as np
import pytest

from ssdfolio.backtest import BacktestData, run_rolling
from ssdfolio.config import RunConfig
from ssdfolio.data import ScenarioSet, load_market_data
from ssdfolio.synth import SyntheticSpec, write_synthetic


def random_instance(rng, N, T, sectors=None, slack=0.004):
    """Scenario set whose benchmark is dominated by some 0.01-grid portfolio.

    The benchmark is a random admissible grid portfolio's return minus a
    small nonnegative shift, so the SSD block is always feasible.
    """
    R = rng.normal(0.002, 0.03, (T, N))
    counts = np.zeros(N, dtype=int)
    left = 100
    while left:
        j = rng.integers(N)
        if counts[j] < 30:
            counts[j] += 1
            left -= 1
    y = R @ (counts / 100.0) - rng.uniform(0.0, slack, T)
    kw = {}
    if sectors is not None:
        kw["asset_sectors"] = tuple(sectors)
    return ScenarioSet.equiprobable(R, y, **kw)


def capped_simplex_projection(v, cap):
    """Euclidean projection onto {x : sum x = 1, 0 <= x <= cap} by bisection on the shift."""
    lo, hi = v.min() - cap - 1.0, v.max() + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.clip(v - mid, 0.0, cap).sum() > 1.0:
            lo = mid
        else:
            hi = mid
    return np.clip(v - 0.5 * (lo + hi), 0.0, cap)


def make_config(paths, **kw):
    return RunConfig(prices=paths["prices"], ratios=paths["ratios"], sectors=paths["sectors"],
                     benchmark=paths["benchmark"], **kw)


def load_data(cfg):
    return BacktestData.from_market(load_market_data(cfg.prices, cfg.ratios, cfg.sectors, cfg.benchmark))


@pytest.fixture(scope="session")
def synthetic_paths(tmp_path_factory):
    out = tmp_path_factory.mktemp("synthetic")
    return write_synthetic(SyntheticSpec(n_assets=24, n_sectors=6, weeks=200, seed=42), out)


@pytest.fixture(scope="session")
def synthetic_config(synthetic_paths):
    return make_config(synthetic_paths).validate()


@pytest.fixture(scope="session")
def synthetic_data(synthetic_config):
    return load_data(synthetic_config)


@pytest.fixture(scope="session")
def synthetic_report(synthetic_config, synthetic_data):
    return run_rolling(synthetic_config, synthetic_data)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record_criterion(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}")
