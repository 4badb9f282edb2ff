import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import load_data, make_config
from ssdfolio.backtest import (
    SSD_FAMILY,
    BacktestData,
    Phase,
    downside_pattern,
    fit_models,
    phase_window,
    plan_windows,
    run_phases,
    run_rolling,
)
from ssdfolio.config import RunConfig
from ssdfolio.data import RatioPanel, SectorMap
from ssdfolio.errors import DataTooShort, PhaseOutOfRange
from ssdfolio.ratios import LABELS
from ssdfolio.ssd import MODELS
from ssdfolio.synth import SyntheticSpec, write_synthetic


def test_window_counts():
    assert len(plan_windows(65)) == 1
    assert len(plan_windows(117)) == 14
    assert len(plan_windows(199)) == (199 - 65) // 4 + 1
    with pytest.raises(DataTooShort):
        plan_windows(64)


def test_windows_are_contiguous_and_ordered():
    plan = plan_windows(120)
    for w in plan.windows:
        assert w.train.stop == w.test.start
        assert len(w.train) == 52 and len(w.test) == 13
    starts = [w.train.start for w in plan.windows]
    assert starts == list(range(0, 4 * len(plan), 4))


def test_downside_examples():
    np.testing.assert_allclose(downside_pattern([0.1, -0.2]), [-0.2, -0.1])
    np.testing.assert_allclose(downside_pattern([0.5] * 3), [0.5, 1.0, 1.5])


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.integers(1, 300), elements=st.floats(-1, 1)))
def test_downside_sum_preserved(s):
    assert abs(downside_pattern(s)[-1] - s.sum()) <= 1e-12


# ------------------------------------------------------- synthetic backtest


def test_rolling_shape(synthetic_report):
    rep = synthetic_report
    assert len(rep.windows) == 34
    for m in MODELS:
        skipped = sum(1 for _, model, _ in rep.skipped if model == m)
        assert rep.series(m).size == (34 - skipped) * 13


def test_rolling_weights_admissible(synthetic_report):
    for m in MODELS:
        for z in synthetic_report.per_model[m].weights:
            assert abs(z.sum() - 1.0) <= 1e-8
            assert z.min() >= 0.0 and z.max() <= 0.3 + 1e-10


def test_rolling_dominance_audits(synthetic_report):
    family = [row for row in synthetic_report.dominance if row[1] in SSD_FAMILY]
    assert family
    assert all(ok and gap <= 1e-7 for _, _, gap, ok in family)


def test_rolling_returns_are_test_slice_products(synthetic_report, synthetic_data):
    ms = synthetic_report.per_model["SSD"]
    by_id = {w.id: w for w in synthetic_report.windows}
    for wid, z, r in zip(ms.window_ids, ms.weights, ms.returns):
        w = by_id[wid]
        np.testing.assert_array_equal(r, synthetic_data.returns[w.test.start:w.test.stop] @ z)


def test_phase_matches_rolling_window(synthetic_config, synthetic_data, synthetic_report):
    w = synthetic_report.windows[5]
    dates = synthetic_data.return_dates
    phase = Phase("p", dates[w.test.start], dates[w.test.stop - 1])
    assert phase_window(phase, dates, 52) == type(w)("p", w.train, w.test)
    rep = run_phases(synthetic_config, synthetic_data, [phase], extractions=synthetic_report.extractions)["p"]
    for m in MODELS:
        idx = synthetic_report.per_model[m].window_ids.index(w.id)
        np.testing.assert_array_equal(rep.series(m), synthetic_report.per_model[m].returns[idx])


def test_empty_phase_list(synthetic_config, synthetic_data):
    assert run_phases(synthetic_config, synthetic_data, []) == {}


def test_phase_out_of_range(synthetic_data):
    dates = synthetic_data.return_dates
    with pytest.raises(PhaseOutOfRange):
        phase_window(Phase("early", dates[10], dates[20]), dates, 52)


def perturbed(data, rows, rng):
    R = data.returns.copy()
    R[rows] = rng.normal(0.0, 0.05, (len(rows), R.shape[1]))
    bench = data.benchmark.copy()
    bench[rows] = rng.normal(0.0, 0.05, len(rows))
    return BacktestData(data.assets, R, data.return_dates, bench, data.ratios, data.sectors)


@pytest.mark.parametrize("window_index", [0, 16, 33])
def test_no_look_ahead(synthetic_config, synthetic_data, synthetic_report, window_index):
    w = synthetic_report.windows[window_index]
    rng = np.random.default_rng(window_index)
    future = list(range(w.train.stop, synthetic_data.returns.shape[0]))
    fits = fit_models(perturbed(synthetic_data, future, rng), w.train, synthetic_config,
                      synthetic_report.extractions)
    for m in MODELS:
        idx = synthetic_report.per_model[m].window_ids.index(w.id)
        np.testing.assert_array_equal(fits[m].weights, synthetic_report.per_model[m].weights[idx])


def test_parallel_matches_serial(synthetic_config, synthetic_data):
    cfg = RunConfig(**{**synthetic_config.to_dict(), "models": ["SSD", "MinVar"]})
    a = run_rolling(cfg, synthetic_data, jobs=1)
    b = run_rolling(cfg, synthetic_data, jobs=2)
    for m in cfg.models:
        np.testing.assert_array_equal(a.series(m), b.series(m))


# ------------------------------------------------------------ small worlds


def _flat_ratios(assets):
    quarters = pd.date_range("2015-03-31", periods=12, freq="QE")
    rng = np.random.default_rng(0)
    return RatioPanel(tuple(assets), quarters, rng.uniform(1, 2, (12, len(assets), len(LABELS))))


def test_benchmark_replicating_universe():
    rng = np.random.default_rng(1)
    T = 80
    y = rng.normal(0.001, 0.02, T)
    assets = ("a", "b", "c", "d")
    R = np.tile(y[:, None], (1, 4))
    dates = pd.date_range("2017-01-06", periods=T, freq="W-FRI")
    data = BacktestData(assets, R, dates, y, _flat_ratios(assets), SectorMap({a: "X" for a in assets}))
    cfg = RunConfig(models=["SSD"])
    rep = run_rolling(cfg, data)
    expected = np.concatenate([y[w.test.start:w.test.stop] for w in rep.windows])
    np.testing.assert_allclose(rep.series("SSD"), expected, rtol=0, atol=1e-15)


def test_bearish_phase(tmp_path):
    spec = SyntheticSpec(n_assets=24, n_sectors=6, weeks=200, seed=7, regimes=[(120, 200, -0.01)])
    paths = write_synthetic(spec, tmp_path)
    cfg = make_config(paths).validate()
    data = load_data(cfg)
    dates = data.return_dates
    phase = Phase("bearish", dates[125], dates[-1])
    rep = run_phases(cfg, data, [phase])["bearish"]
    for m in MODELS:
        row = rep.metrics[m]
        assert row["mean_return"] < 0
        for name in ("sharpe", "sortino", "starr95", "starr97"):
            assert row[name] is None
