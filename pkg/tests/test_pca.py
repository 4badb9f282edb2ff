import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import published_loadings as P
from ssdfolio.errors import DegenerateColumn
from ssdfolio.pca import (
    PcaSolution,
    RatioObservationMatrix,
    center_scale,
    extract_a,
    extract_b,
    extraction_report,
    fssd_ratio_weights,
    full_loadings,
    loadings_report,
    pca,
)
from ssdfolio.ratios import CATEGORIES, LABELS, meta


def random_ratios(rng, m=60):
    """Correlated 11-column matrix with mixed scales."""
    F = rng.normal(size=(m, 4))
    X = F @ rng.normal(size=(4, 11)) + 0.5 * rng.normal(size=(m, 11))
    return X * rng.uniform(0.01, 100.0, 11) + rng.normal(0, 10, 11)


# ------------------------------------------------------------ center/scale


def test_center_two_points():
    np.testing.assert_allclose(center_scale([[1.0], [3.0]], "covariance")[:, 0], [-1.0, 1.0])


def test_centered_column_unchanged_in_covariance_mode():
    col = np.array([[-2.0], [0.5], [1.5]])
    np.testing.assert_allclose(center_scale(col, "covariance"), col)


def test_correlation_mode_hand_value():
    np.testing.assert_allclose(center_scale([[0.0], [2.0], [4.0]], "correlation")[:, 0], [-1.0, 0.0, 1.0])


def test_constant_column_rejected():
    X = np.random.default_rng(0).normal(size=(20, 11))
    X[:, 4] = 3.0
    with pytest.raises(DegenerateColumn, match="ROA"):
        center_scale(X, "correlation")


# -------------------------------------------------------------------- pca


def test_identity_spectrum():
    rng = np.random.default_rng(1)
    Z = rng.normal(size=(50, 11))
    Q, _ = np.linalg.qr(Z - Z.mean(axis=0))
    sol = pca(Q * np.sqrt(49), "covariance")
    np.testing.assert_allclose(sol.eigenvalues, 1.0, atol=1e-12)
    assert sol.retained_count == 4
    assert sol.covered == pytest.approx(4 / 11, abs=1e-12)


def test_retained_count_rule():
    rng = np.random.default_rng(2)
    X = random_ratios(rng)
    sol = pca(X, variance_target=0.5, component_cap=4)
    needed = int(np.argmax(sol.cumulative_variance >= 0.5)) + 1
    assert sol.retained_count == min(4, needed)
    assert pca(X, variance_target=0.999, component_cap=4).retained_count == 4


def check_numerics(X):
    """Trace identity, orthogonality, reconstruction and scale invariance for one matrix."""
    sol = pca(X)
    C = np.corrcoef(X, rowvar=False)
    trace_err = abs(sol.eigenvalues.sum() - np.trace(C)) / np.trace(C)
    V = sol.eigenvectors
    orth_err = np.abs(V.T @ V - np.eye(11)).max()
    L = full_loadings(sol)
    recon_err = np.abs(L @ L.T - C).max()
    scaled = pca(X * np.random.default_rng(int(abs(X[0, 0]) * 1e6) % 2**32).uniform(0.001, 1000.0, 11))
    scale_err = max(
        np.abs(scaled.eigenvalues - sol.eigenvalues).max(),
        np.abs(scaled.loadings - sol.loadings).max(),
        np.abs(scaled.communalities - sol.communalities).max(),
    )
    return trace_err, orth_err, recon_err, scale_err


@pytest.mark.parametrize("seed", range(20))
def test_numerics(seed):
    trace_err, orth_err, recon_err, scale_err = check_numerics(random_ratios(np.random.default_rng(seed)))
    assert trace_err <= 1e-9
    assert orth_err <= 1e-10
    assert recon_err <= 1e-8
    assert scale_err <= 1e-9


def test_sign_rule_largest_entry_positive():
    sol = pca(random_ratios(np.random.default_rng(3)))
    for c in range(11):
        v = sol.eigenvectors[:, c]
        assert v[np.argmax(np.abs(v))] > 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_communality_monotone_in_components(seed, k):
    X = random_ratios(np.random.default_rng(seed))
    a = pca(X, variance_target=1.0, component_cap=k)
    b = pca(X, variance_target=1.0, component_cap=k + 1)
    assert np.all(b.communalities >= a.communalities - 1e-12)


def test_observation_matrix_stacks_quarters():
    import pandas as pd

    from ssdfolio.data import RatioPanel

    quarters = pd.date_range("2010-03-31", periods=3, freq="QE")
    vals = np.arange(3 * 2 * 11, dtype=float).reshape(3, 2, 11)
    panel = RatioPanel(("a", "b"), quarters, vals)
    X = RatioObservationMatrix.from_panel(panel, ["b"], until=quarters[2])
    np.testing.assert_array_equal(X.values, vals[:2, 1, :])


# ------------------------------------------------------------- extraction


@pytest.mark.parametrize("sector", ["CD", "Energy", "FMCG", "IT"])
def test_published_rule_a(sector):
    sol = PcaSolution.from_loadings(P.LOADINGS[sector], P.published_cv(sector))
    assert extract_a(sol).labels == P.EXPECTED[sector][0]


@pytest.mark.parametrize("sector", ["CD", "Energy", "FMCG", "IT"])
def test_published_rule_b(sector):
    sol = PcaSolution.from_loadings(P.LOADINGS[sector], P.published_cv(sector))
    assert extract_b(sol).labels == P.EXPECTED[sector][1]


@pytest.mark.parametrize("sector", ["CD", "Energy", "FMCG", "IT"])
def test_published_cv_echo(sector):
    sol = PcaSolution.from_loadings(P.LOADINGS[sector], P.published_cv(sector))
    row = extraction_report({sector: extract_a(sol)}).iloc[0]
    assert row["CV"] == P.EXPECTED[sector][2]


@pytest.mark.parametrize("sector", ["CD", "Energy", "FMCG", "IT"])
def test_published_communalities_match_loadings(sector):
    sol = PcaSolution.from_loadings(P.LOADINGS[sector])
    diff = np.abs(sol.communalities - np.asarray(P.COMMUNALITIES[sector]))
    if sector == "FMCG":
        # the printed PBR communality disagrees with its own printed loadings
        i = LABELS.index("PBR")
        assert diff[i] == pytest.approx(0.9531 - 0.952013, abs=1e-5)
        diff[i] = 0.0
    assert diff.max() <= 6e-4


def test_it_rule_b_picks_the_marked_communalities():
    sol = PcaSolution.from_loadings(P.IT)
    picks = extract_b(sol).labels
    assert picks == ("CCL", "ROA", "DER", "PER")
    idx = [LABELS.index(p) for p in picks]
    np.testing.assert_allclose(np.asarray(P.IT_COMM)[idx], [0.9898, 0.8639, 0.9905, 0.9828])


def test_identity_block_loadings():
    L = np.zeros((11, 4))
    L[:4, :4] = np.eye(4)
    sol = PcaSolution.from_loadings(L)
    assert extract_a(sol, max_per_category=None).labels == ("QR", "CR", "CCL", "NPM")
    capped = extract_a(sol).labels
    assert capped[:2] == ("QR", "CR") and "CCL" not in capped


def test_equal_communalities_tie_break():
    sol = PcaSolution.from_loadings(np.full((11, 2), 0.5))
    assert extract_b(sol).labels == ("QR", "NPM", "DER", "PER")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_extraction_category_invariants(seed):
    rng = np.random.default_rng(seed)
    sol = PcaSolution.from_loadings(rng.uniform(-1, 1, (11, 4)))
    a = extract_a(sol)
    cats = [meta(lbl).category for lbl in a.labels]
    assert all(cats.count(c) <= 2 for c in CATEGORIES)
    assert len(set(a.labels)) == 4
    b = extract_b(sol)
    assert [meta(lbl).category for lbl in b.labels] == list(CATEGORIES)


def test_fssd_weights_bse():
    sol = PcaSolution.from_loadings(P.ALL_BSE, variance_proportions=P.ALL_BSE_PROP)
    terms = fssd_ratio_weights(sol)
    assert tuple(t.label for t in terms) == ("CR", "DER", "PBR", "CPTI")
    np.testing.assert_array_equal(np.round([t.weight for t in terms], 4), P.ALL_BSE_PROP)
    signs = {t.label: t.sign for t in terms}
    assert signs["DER"] == -1 and signs["CR"] == 1


def test_fssd_weights_bse_from_loadings_alone():
    # without the published proportions, column sums of squares give the same weights to 4 decimals
    terms = fssd_ratio_weights(PcaSolution.from_loadings(P.ALL_BSE))
    np.testing.assert_allclose([t.weight for t in terms], P.ALL_BSE_PROP, atol=1e-4)


def test_fssd_weights_sp500():
    sol = PcaSolution.from_loadings(P.ALL_SP500, variance_proportions=P.ALL_SP500_PROP)
    assert tuple(t.label for t in fssd_ratio_weights(sol)) == ("ROA", "ROE", "CCL", "CPTI")


def test_loadings_report_layout():
    sol = PcaSolution.from_loadings(P.CD, P.published_cv("CD"))
    rep = loadings_report(sol)
    assert list(rep.columns) == ["category", "ratio", "PC1", "PC2", "PC3", "PC4", "Comm."]
    assert rep["ratio"].iloc[-1] == "CV"
    assert rep.shape[0] == 12
