import io
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import capped_simplex_projection
from ssdfolio.lp import LinearProgram, QuadraticProgram, Status, solve_lp, solve_qp, write_mps


def vertex_oracle(c, A, b, hi):
    """max c x over {A x <= b, 0 <= x <= hi} by enumerating every basic solution."""
    n = c.size
    G = np.vstack([A, -np.eye(n), np.eye(n)])
    h = np.concatenate([b, np.zeros(n), hi])
    best = -np.inf
    for rows in itertools.combinations(range(G.shape[0]), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        x = np.linalg.solve(M, h[list(rows)])
        if np.all(G @ x <= h + 1e-9):
            best = max(best, float(c @ x))
    return best


def test_single_bounded_variable():
    res = solve_lp(LinearProgram([1.0], hi=[0.3]))
    assert res.status is Status.OPTIMAL
    assert res.x[0] == pytest.approx(0.3)


def test_budget_row():
    res = solve_lp(LinearProgram([1.0, 1.0], A_ub=[[1.0, 1.0]], b_ub=[1.0]))
    assert res.objective == pytest.approx(1.0)


def test_infeasible_and_unbounded():
    infeasible = LinearProgram([1.0, 1.0], A_eq=[[1.0, 1.0]], b_eq=[1.0], hi=[0.3, 0.3])
    assert solve_lp(infeasible).status is Status.INFEASIBLE
    unbounded = LinearProgram([1.0, 0.0], A_ub=[[-1.0, 1.0]], b_ub=[1.0])
    assert solve_lp(unbounded).status is Status.UNBOUNDED


def test_free_variables():
    # max -|x - 2| style: max t  s.t. t <= x - 2, t <= 2 - x with x, t free
    lp = LinearProgram([0.0, 1.0], A_ub=[[-1.0, 1.0], [1.0, 1.0]], b_ub=[-2.0, 2.0], lo=-np.inf, hi=np.inf)
    res = solve_lp(lp)
    assert res.ok and res.x[0] == pytest.approx(2.0) and res.objective == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(25))
def test_matches_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    n, m = rng.integers(2, 7), rng.integers(1, 7)
    A = rng.normal(size=(m, n))
    b = rng.uniform(0.1, 2.0, m)
    c = rng.normal(size=n)
    hi = rng.uniform(0.2, 2.0, n)
    res = solve_lp(LinearProgram(c, A, b, lo=0.0, hi=hi))
    assert res.status is Status.OPTIMAL
    assert res.objective == pytest.approx(vertex_oracle(c, A, b, hi), abs=1e-7)
    assert res.max_violation <= 1e-9


@pytest.mark.parametrize("seed", range(15))
def test_duality_gap(seed):
    rng = np.random.default_rng(100 + seed)
    n, m = 5, 4
    A = rng.normal(size=(m, n))
    b = rng.uniform(0.5, 2.0, m)
    c = rng.normal(size=n)
    hi = np.full(n, 0.6)
    Ae, be = np.ones((1, n)), np.array([1.0])
    res = solve_lp(LinearProgram(c, A, b, Ae, be, 0.0, hi))
    assert res.ok
    y, ye = res.duals_ub, res.duals_eq
    assert np.all(y >= -1e-9)
    reduced = c - A.T @ y - Ae.T @ ye
    dual = b @ y + be @ ye + hi @ np.maximum(reduced, 0.0)
    assert abs(dual - res.objective) <= 1e-6 * max(1.0, abs(res.objective))


@pytest.mark.parametrize("seed", range(10))
def test_warm_start_reproduces_optimum(seed):
    rng = np.random.default_rng(200 + seed)
    n, m = 6, 5
    lp = LinearProgram(rng.normal(size=n), rng.normal(size=(m, n)), rng.uniform(0.5, 2, m),
                       np.ones((1, n)), [1.0], 0.0, 0.4)
    cold = solve_lp(lp)
    warm = solve_lp(lp, warm_start=cold.basis)
    assert warm.ok
    assert abs(warm.objective - cold.objective) <= 1e-10
    assert warm.iterations <= cold.iterations


def test_degenerate_lp_terminates():
    # many identical rows through the optimum
    n = 4
    A = np.vstack([np.ones((6, n)), np.eye(n)])
    b = np.concatenate([np.ones(6), np.full(n, 0.5)])
    res = solve_lp(LinearProgram(np.arange(1.0, n + 1), A, b))
    assert res.ok and res.objective == pytest.approx(0.5 * 4 + 0.5 * 3)


def test_write_mps_round_numbers():
    buf = io.StringIO()
    write_mps(LinearProgram([1.0, 2.0], [[1.0, 1.0]], [1.0], hi=[0.3, np.inf]), buf, "TINY")
    text = buf.getvalue()
    assert text.startswith("NAME")
    for section in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"):
        assert section in text
    assert "UP BND" in text


def test_qp_identity_symmetry():
    qp = QuadraticProgram(np.eye(4), A_eq=np.ones((1, 4)), b_eq=[1.0], lo=0.0, hi=0.3)
    res = solve_qp(qp)
    assert res.ok
    np.testing.assert_allclose(res.x, 0.25, atol=1e-6)


def test_qp_bound_arithmetic_infeasible():
    qp = QuadraticProgram(np.eye(2), A_eq=np.ones((1, 2)), b_eq=[1.0], lo=0.0, hi=0.3)
    assert solve_qp(qp).status is Status.INFEASIBLE


def test_qp_rejects_indefinite():
    with pytest.raises(ValueError):
        QuadraticProgram(np.diag([1.0, -1.0]))


def _random_capped_simplex(rng, n, cap, size):
    pts = rng.dirichlet(np.ones(n), size * 4)
    pts = pts[np.all(pts <= cap, axis=1)]
    return pts[:size]


@pytest.mark.parametrize("seed", range(5))
def test_qp_beats_monte_carlo(seed):
    rng = np.random.default_rng(300 + seed)
    n = 5
    B = rng.normal(size=(n, n))
    Q = B @ B.T / n
    q = rng.normal(scale=0.1, size=n)
    res = solve_qp(QuadraticProgram(Q, q, A_eq=np.ones((1, n)), b_eq=[1.0], lo=0.0, hi=0.3))
    assert res.ok
    pts = np.vstack([_random_capped_simplex(rng, n, 0.3, 250_000) for _ in range(4)])[:1_000_000]
    vals = np.einsum("ij,jk,ik->i", pts, Q, pts) + pts @ q
    assert res.objective <= vals.min() + 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_qp_projected_gradient_fixed_point(seed):
    rng = np.random.default_rng(400 + seed)
    n = int(rng.integers(4, 9))
    B = rng.normal(size=(n, n - 2))  # rank deficient on purpose
    Q = B @ B.T
    q = rng.normal(size=n)
    res = solve_qp(QuadraticProgram(Q, q, A_eq=np.ones((1, n)), b_eq=[1.0], lo=0.0, hi=0.35))
    assert res.ok
    x = res.x
    grad = 2 * Q @ x + q
    step = 1.0 / (2 * np.linalg.norm(Q, 2) + 1.0)
    assert np.linalg.norm(x - capped_simplex_projection(x - step * grad, 0.35)) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lp_feasible_output_property(seed):
    rng = np.random.default_rng(seed)
    n, m = 4, 3
    lp = LinearProgram(rng.normal(size=n), rng.normal(size=(m, n)), rng.uniform(0.1, 1, m),
                       np.ones((1, n)), [1.0], 0.0, 0.5)
    res = solve_lp(lp)
    if res.ok:
        assert lp.violation(res.x) <= 1e-9
        assert res.objective == pytest.approx(vertex_oracle_eq(lp), abs=1e-7)


def vertex_oracle_eq(lp):
    """Same enumeration with the budget row written as two inequalities."""
    A = np.vstack([lp.A_ub, lp.A_eq, -lp.A_eq])
    b = np.concatenate([lp.b_ub, lp.b_eq, -lp.b_eq])
    return vertex_oracle(lp.c, A, b, lp.hi)
