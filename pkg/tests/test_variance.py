import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_instance
from ssdfolio.errors import InfeasibleError
from ssdfolio.variance import CovarianceEstimate, solve_mean_var, solve_min_var


def random_feasible(rng, n, cap, size):
    out = []
    while sum(len(o) for o in out) < size:
        pts = rng.dirichlet(np.ones(n), size)
        out.append(pts[np.all(pts <= cap, axis=1)])
    return np.vstack(out)[:size]


def est(S, mean=None, bench=0.0):
    n = np.asarray(S).shape[0]
    return CovarianceEstimate(S, np.zeros(n) if mean is None else mean, bench)


def test_identity_equal_weights():
    np.testing.assert_allclose(solve_min_var(est(np.eye(4))).weights, 0.25, atol=1e-6)


def test_one_noisy_asset():
    z = solve_min_var(est(np.diag([1.0, 1.0, 1.0, 100.0]))).weights
    np.testing.assert_allclose(z, [0.3, 0.3, 0.3, 0.1], atol=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_min_var_beats_random_portfolios(seed):
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(5, 5))
    S = B @ B.T / 5
    port = solve_min_var(est(S))
    pts = random_feasible(rng, 5, 0.3, 100_000)
    assert port.objective <= np.einsum("ij,jk,ik->i", pts, S, pts).min() + 1e-12


def test_slack_floor_equals_min_var():
    rng = np.random.default_rng(7)
    B = rng.normal(size=(6, 6))
    mean = rng.normal(0.001, 0.002, 6)
    e = est(B @ B.T, mean)
    a = solve_min_var(e).weights
    b = solve_mean_var(e, target=mean.min() - 1e-3).weights
    np.testing.assert_allclose(b, a, atol=1e-8)


def test_unreachable_floor_infeasible():
    mean = np.array([0.01, 0.02, 0.03, 0.04])
    with pytest.raises(InfeasibleError):
        solve_mean_var(est(np.eye(4), mean), target=0.3 * 0.04 + 0.3 * 0.03 + 0.3 * 0.02 + 0.1 * 0.01 + 1e-6)


def test_binding_floor_matches_grid():
    rng = np.random.default_rng(8)
    B = rng.normal(size=(4, 4))
    S = B @ B.T / 4 + 0.1 * np.eye(4)
    mean = np.array([0.001, 0.002, 0.004, 0.006])
    target = 0.0036
    assert solve_min_var(est(S, mean)).weights @ mean < target
    port = solve_mean_var(est(S, mean), target=target)
    assert port.weights @ mean == pytest.approx(target, abs=1e-10)
    best = np.inf
    for a in range(31):
        for b in range(31):
            for c in range(31):
                d = 100 - a - b - c
                if 0 <= d <= 30:
                    z = np.array([a, b, c, d]) / 100
                    if z @ mean >= target:
                        best = min(best, z @ S @ z)
    assert best - 5e-3 <= port.objective <= best + 1e-12


def test_nesting_and_scale_invariance():
    scen = random_instance(np.random.default_rng(9), 6, 30)
    e = CovarianceEstimate.from_scenarios(scen)
    mv = solve_min_var(e)
    mean_var = solve_mean_var(e)
    assert mv.objective <= mean_var.objective + 1e-15
    scaled = CovarianceEstimate(e.cov * 37.0, e.mean, e.benchmark_mean)
    np.testing.assert_allclose(solve_min_var(scaled).weights, mv.weights, atol=1e-8)


def test_rank_deficient_covariance():
    rng = np.random.default_rng(10)
    R = rng.normal(size=(5, 12))  # fewer scenarios than assets
    e = CovarianceEstimate(np.cov(R, rowvar=False), R.mean(axis=0), 0.0)
    port = solve_min_var(e)
    assert not port.violations()
    assert port.objective >= -1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(4, 10))
def test_outputs_admissible(seed, n):
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(n, n))
    port = solve_min_var(est(B @ B.T))
    assert not port.violations()
