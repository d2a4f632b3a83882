import numpy as np
import pytest
from hypothesis import given, strategies as st

from dualcurv import _parallel
from dualcurv.exceptions import ConfigError, DomainError, UnsupportedError
from dualcurv.generators import cross_polytope, cube, random_tangent, shifted_cube, simplex_centered
from dualcurv.geometry import Subspace, ball, product_ball, scale, volume
from dualcurv.measures import (
    PhiSpec, QuadratureSpec, concentration_ratio, facet_masses, subspace_measure_facet,
    subspace_measure_spherical, total_measure,
)

MC = QuadratureSpec("mc", 200_000, 3)
PRODUCT = QuadratureSpec("product", 40_000)

# scipy dblquad over one face of [-1,1]^3, times 6 faces / 3
CUBE3_TOTAL = {2.5: 7.1114258340541054, 4.5: 11.665366642306411}


def normal_line(body, i=0):
    return Subspace.from_basis([body.hrep().normals[i]])


# ---------------------------------------------------------------- examples --

@pytest.mark.parametrize("q", [-1.0, 0.0, 2.5, 7.0])
def test_ball_total_is_volume(q):
    assert np.isclose(total_measure(ball(3), PhiSpec(q), PRODUCT), 4 * np.pi / 3, rtol=1e-12)


def test_cube_total_is_volume():
    assert np.isclose(total_measure(cube(3), PhiSpec(3.0)), 8.0, rtol=1e-14)


@pytest.mark.parametrize("body", [cube(3), shifted_cube(3, 0.3), random_tangent(3, 9, 0)], ids=lambda b: b.name)
def test_q_zero_gives_ball_volume(body):
    assert np.isclose(total_measure(body, PhiSpec(0.0), PRODUCT), 4 * np.pi / 3, rtol=1e-6)


@pytest.mark.parametrize("q", [2.5, 4.5])
def test_cube_total_against_frozen_oracle(q):
    assert np.isclose(total_measure(cube(3), PhiSpec(q)), CUBE3_TOTAL[q], rtol=1e-10)


def test_subspace_facet_examples():
    phi = PhiSpec(3.0)
    assert subspace_measure_facet(cube(3), phi, Subspace.coordinate(3, [0])) == pytest.approx(8 / 3, rel=1e-14)
    assert subspace_measure_facet(cube(2), PhiSpec(2.0), Subspace.coordinate(2, [0])) == pytest.approx(2.0, rel=1e-14)
    assert subspace_measure_facet(simplex_centered(3), phi, Subspace.coordinate(3, [0])) == 0.0


def test_subspace_facet_needs_positive_q():
    with pytest.raises(UnsupportedError):
        subspace_measure_facet(cube(3), PhiSpec(-1.0), Subspace.coordinate(3, [0]))


def test_subspace_spherical_examples():
    phi = PhiSpec(3.0)
    m, se, flagged = subspace_measure_spherical(cube(3), phi, Subspace.coordinate(3, [0]), MC)
    assert abs(m - 8 / 3) <= 4 * se and flagged < 1e-3
    m, _, _ = subspace_measure_spherical(cube(3), phi, Subspace.coordinate(3, [0, 1]), PRODUCT)
    # the subspace indicator jumps along cube edges, so the product rule is only first order here
    assert m == pytest.approx(16 / 3, rel=2e-3)
    assert subspace_measure_spherical(ball(3), PhiSpec(2.5), Subspace.coordinate(3, [0]), MC)[0] == 0.0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_cube_ratio_is_k_over_n(n):
    assert concentration_ratio(cube(n), PhiSpec(n), Subspace.coordinate(n, [0])).ratio == pytest.approx(1 / n, abs=1e-12)


def test_ratio_examples():
    assert concentration_ratio(ball(3), PhiSpec(2.0), Subspace.coordinate(3, [0])).ratio == 0.0
    r = concentration_ratio(cube(3), PhiSpec(3.0), Subspace.coordinate(3, [0, 1]))
    assert r.ratio == pytest.approx(2 / 3, abs=1e-14) and r.method == "facet"


def test_report_json_shape():
    L = Subspace.coordinate(3, [0])
    doc = concentration_ratio(cube(3), PhiSpec(3.0), L).to_dict("cube3", PhiSpec(3.0), L)
    assert set(doc) == {"body", "q", "phi", "L", "total", "subspace", "ratio", "stderr", "method",
                        "flagged_fraction"}


def test_config_errors():
    with pytest.raises(ConfigError):
        QuadratureSpec(samples=0)
    with pytest.raises(ConfigError):
        QuadratureSpec(method="simpson")
    with pytest.raises(DomainError):
        PhiSpec(2.0, lambda U: -np.ones(len(U)), name="neg").on_sphere(np.eye(3))


# -------------------------------------------------------------- properties --

@given(st.floats(-2, 6), st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 0.1))
def test_phi_homogeneity(q, v):
    u = np.asarray(v) / np.linalg.norm(v)
    phi = PhiSpec(q, lambda U: 1.0 + 0.5 * U[:, 0] ** 2, name="aniso")
    assert np.isclose(phi(2 * u)[0], 2 ** (q - 3) * phi(u)[0], rtol=1e-12)


@pytest.mark.parametrize("q", [2.5, 3.0, 5.0])
@pytest.mark.parametrize("body", [cube(3), cross_polytope(3), shifted_cube(3, 0.3), random_tangent(3, 10, 0),
                                  random_tangent(3, 12, 3)], ids=lambda b: b.name)
def test_mc_agrees_with_facet(body, q):
    L = normal_line(body)
    phi = PhiSpec(q)
    exact = subspace_measure_facet(body, phi, L)
    mc, se, _ = subspace_measure_spherical(body, phi, L, MC)
    assert abs(mc - exact) <= 3 * se


def test_generalised_phi_routes_agree():
    phi = PhiSpec(2.5, lambda U: 1.0 + 0.5 * U[:, 0] ** 2, name="aniso")
    body = shifted_cube(3, 0.3)
    facet = concentration_ratio(body, phi, Subspace.coordinate(3, [0]))
    prod = concentration_ratio(body, phi, Subspace.coordinate(3, [0]), QuadratureSpec("product", 200_000))
    assert facet.total == pytest.approx(prod.total, rel=1e-5)
    assert facet.ratio == pytest.approx(prod.ratio, abs=3e-3)


@pytest.mark.parametrize("alpha", [0.5, 2.0])
@pytest.mark.parametrize("q", [2.5, 4.0])
def test_scaling_covariance(alpha, q):
    body = random_tangent(3, 10, 1)
    phi = PhiSpec(q)
    assert np.isclose(total_measure(scale(body, alpha), phi), alpha**q * total_measure(body, phi), rtol=1e-9)


@pytest.mark.parametrize("body", [cube(4), simplex_centered(4), random_tangent(3, 12, 2), cross_polytope(3)],
                         ids=lambda b: b.name)
def test_q_equal_n_is_volume(body):
    n = body.dim
    assert np.isclose(np.sum(facet_masses(body, PhiSpec(n))), volume(body), rtol=1e-10)


@pytest.mark.parametrize("q", [2.5, 3.0, 4.5])
def test_facet_additivity(q):
    body, phi = shifted_cube(3, 0.3), PhiSpec(q)
    a = subspace_measure_facet(body, phi, Subspace.coordinate(3, [0]))
    b = subspace_measure_facet(body, phi, Subspace.coordinate(3, [1]))
    ab = subspace_measure_facet(body, phi, Subspace.coordinate(3, [0, 1]))
    assert a + b == pytest.approx(ab, rel=1e-15)


def test_mc_bit_identical_across_threads():
    body, phi, L = random_tangent(3, 10, 0), PhiSpec(2.5), Subspace.coordinate(3, [0])
    out = []
    for t in (1, 8):
        _parallel.set_threads(t)
        out.append(concentration_ratio(body, phi, L, MC))
    _parallel.set_threads(None)
    assert out[0] == out[1]


def test_ratio_report_invariants(polytope_suite):
    for body in polytope_suite:
        r = concentration_ratio(body, PhiSpec(2.5), normal_line(body))
        assert 0 <= r.ratio <= 1 and r.subspace_mass <= r.total and r.total > 0


def test_product_ball_masses():
    body = product_ball(3, 1)
    q = 2.5
    r = concentration_ratio(body, PhiSpec(q), Subspace.coordinate(3, [0]))
    # mass over the two cap cones {|u_1| >= |u'|}: (2/3) * 2 pi * int_0^{pi/4} sec^q sin
    exact = 4 * np.pi * (2 ** ((q - 1) / 2) - 1) / (q - 1) / 3
    assert r.subspace_mass == pytest.approx(exact, rel=1e-9)
