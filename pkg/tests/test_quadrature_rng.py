import numpy as np
import pytest
from hypothesis import given, strategies as st

from dualcurv import _parallel
from dualcurv.quadrature import (
    ball_volume, circle_rule, composite_gauss, gauss_legendre, simplex_rule, simplex_volume,
    sphere_area, sphere_rule,
)
from dualcurv.rng import CHUNK, chunked_sums, gaussian_block, pairwise_sum, sphere_block, uniform_block


@given(st.integers(0, 15), st.floats(-3, 0), st.floats(0.1, 3))
def test_gauss_legendre_exact_for_polynomials(deg, a, w):
    b = a + w
    x, wt = gauss_legendre(a, b, 8)
    assert np.isclose(wt @ x**deg, (b ** (deg + 1) - a ** (deg + 1)) / (deg + 1), rtol=1e-12, atol=1e-12)


def test_composite_gauss_covers_breaks():
    x, w = composite_gauss([0.0, 0.3, 1.0], 5)
    assert np.isclose(w.sum(), 1.0) and np.isclose(w @ x, 0.5)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_simplex_rule_moments(dim):
    lam, w = simplex_rule(dim, 6)
    assert np.isclose(w.sum(), 1.0)
    # E[lambda_0^2] over the uniform simplex is 2 / ((dim + 1)(dim + 2))
    assert np.isclose(w @ lam[:, 0] ** 2, 2.0 / ((dim + 1) * (dim + 2)), rtol=1e-12)


def test_simplex_volume_and_balls():
    assert np.isclose(simplex_volume(np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1.0]])), 1 / 6)
    assert np.isclose(sphere_area(3), 4 * np.pi) and np.isclose(ball_volume(3), 4 * np.pi / 3)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_sphere_rule_total_area(dim):
    U, w = sphere_rule(dim, 16)
    assert np.allclose(np.linalg.norm(U, axis=1), 1.0)
    assert np.isclose(w.sum(), 2.0 if dim == 1 else sphere_area(dim), rtol=1e-12)


def test_circle_rule():
    U, w = circle_rule(12)
    assert np.isclose(w.sum(), 2 * np.pi) and np.allclose(w @ U, 0.0, atol=1e-14)


@given(st.integers(0, 2**63), st.integers(0, 5000), st.integers(1, 300))
def test_streams_are_counter_based(seed, start, count):
    full = uniform_block(seed, 0, start + count, 3)
    assert np.array_equal(uniform_block(seed, start, count, 3), full[start:])


def test_distributions():
    g = gaussian_block(3, 0, 200_000, 2)
    assert abs(g.mean()) < 0.01 and abs(g.std() - 1) < 0.01
    u = sphere_block(3, 0, 10, 4)
    assert np.allclose(np.linalg.norm(u, axis=1), 1.0)
    assert not np.array_equal(sphere_block(3, 0, 10, 4), sphere_block(4, 0, 10, 4))


def test_chunked_sums_independent_of_threads():
    def f(U):
        return np.column_stack([U[:, 0] ** 2, np.abs(U[:, 1])])

    total = 3 * CHUNK + 17
    out = []
    for t in (1, 3, 8):
        _parallel.set_threads(t)
        out.append(chunked_sums(f, total, 11, 3))
    _parallel.set_threads(None)
    for s1, s2 in out[1:]:
        assert np.array_equal(s1, out[0][0]) and np.array_equal(s2, out[0][1])
    assert np.isclose(out[0][0][0] / total, 1 / 3, atol=0.01)


def test_pairwise_sum_and_pmap_order():
    v = np.arange(1000.0)[:, None]
    assert pairwise_sum(v)[0] == v.sum()
    _parallel.set_threads(4)
    try:
        assert _parallel.pmap(lambda x: x * x, range(50)) == [x * x for x in range(50)]
    finally:
        _parallel.set_threads(None)


def test_thread_env(monkeypatch):
    monkeypatch.setenv("DUALCURV_THREADS", "3")
    assert _parallel.n_threads() == 3
