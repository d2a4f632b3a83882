import numpy as np
import pytest
from hypothesis import given, strategies as st

from dualcurv.exceptions import BodyFileError, DomainError, InvariantError, UnsupportedError
from dualcurv.generators import (
    centered, cross_polytope, cube, random_tangent, regular_simplex_vertices, shifted_cube,
    simplex_centered,
)
from dualcurv.geometry import (
    HPolytope, Subspace, asymmetry_constant, body_from_dict, body_to_dict, centroid,
    containment_bisection, hpolytope, load_body, product_ball, project_body, radial, radial_extended,
    radial_gauss, radial_gauss_many, radial_many, save_body, scale, slice_body, support, support_many,
    volume, vpolytope,
)
from dualcurv.geometry.polytope import delaunay_volume
from dualcurv.quadrature import sphere_rule

from conftest import unit

directions = st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 0.1)


# ---------------------------------------------------------------- examples --

def test_radial_examples():
    c = cube(3)
    assert radial(c, [1, 0, 0]) == 1.0
    assert np.isclose(radial(c, unit([1, 1, 1])), np.sqrt(3), rtol=1e-14)
    assert radial(product_ball(3, 1), [0, 0, 1]) == 1.0


def test_radial_matches_bisection_oracle():
    c = cube(3)
    u = unit([1, 1, 1])
    lo, hi = 0.0, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if c.contains(mid * u)[0] else (lo, mid)
    assert np.isclose(radial(c, u), lo, rtol=1e-12)


def test_radial_rejects_non_unit():
    with pytest.raises(DomainError):
        radial(cube(3), [2, 0, 0])


def test_support_examples():
    assert support(cube(4), np.eye(4)[0]) == 1.0
    assert np.isclose(support(cube(2), [1, 1]), 2.0)
    v = regular_simplex_vertices(2)
    angles = np.sort(np.degrees(np.arctan2(v[:, 1], v[:, 0])) % 360)
    assert np.allclose(angles, [90, 210, 330])
    assert np.isclose(support(vpolytope("tri", v), [0, 1]), 1.0)


def test_radial_gauss_examples():
    nu, uniq = radial_gauss(cube(3), [1, 0, 0])
    assert np.allclose(nu, [1, 0, 0]) and uniq
    nu, uniq = radial_gauss(cube(2), unit([1, 1]))
    assert np.allclose(nu, [1, 0]) and not uniq
    nu, uniq = radial_gauss(shifted_cube(3, 0.3), [-1, 0, 0])
    assert np.allclose(nu, [-1, 0, 0]) and uniq


def test_asymmetry_examples():
    assert asymmetry_constant(cube(3)).gamma == 1.0
    res = asymmetry_constant(shifted_cube(3, 0.3))
    assert abs(res.gamma - 0.7 / 1.3) <= 1e-12
    assert abs(res.bisection_gamma - res.gamma) <= 1e-6
    for n in (2, 3, 4):
        r = asymmetry_constant(simplex_centered(n))
        assert abs(r.gamma - 1 / n) <= 1e-6 and abs(r.bisection_gamma - 1 / n) <= 1e-6


def test_centroid_examples():
    assert np.allclose(centroid(cube(3)), 0)
    tri = vpolytope("tri", [[-0.1, -0.1], [1, -0.1], [-0.1, 1]])
    assert np.allclose(centroid(tri), [0.8 / 3, 0.8 / 3])
    box = hpolytope("box", [[1, 0], [-1, 0], [0, 1], [0, -1]], [1.5, 0.5, 1, 1])
    assert np.allclose(centroid(box), [0.5, 0])
    assert np.allclose(centroid(simplex_centered(3)), 0, atol=1e-12)


def test_projection_examples():
    c = cube(3)
    seg = project_body(c, Subspace.coordinate(3, [0]))
    assert np.allclose(np.sort(seg.hrep().vertices.ravel()), [-1, 1])
    sq = project_body(c, Subspace.coordinate(3, [0, 1]))
    assert len(sq.hrep().vertices) == 4 and np.allclose(np.abs(sq.hrep().vertices), 1)
    octa = project_body(cross_polytope(3), Subspace.coordinate(3, [2]))
    assert np.allclose(np.sort(octa.hrep().vertices.ravel()), [-1, 1])


def test_slice_examples():
    L = Subspace.coordinate(3, [0])
    sec = slice_body(cube(3), L, [0.5])
    assert np.isclose(sec.measure(), 4.0) and np.allclose(np.abs(sec.vertices), 1)
    disc = slice_body(product_ball(3, 1), L, [0.5])
    assert disc.kind == "ball" and disc.radius == 1.0
    sq = slice_body(cross_polytope(3), L, [0.5])
    assert np.allclose(np.abs(sq.vertices).sum(axis=1), 0.5)
    assert np.isclose(sq.measure(), 0.5)


def test_slice_outside_rejected():
    with pytest.raises(DomainError):
        slice_body(cube(3), Subspace.coordinate(3, [0]), [1.2])
    with pytest.raises(DomainError):
        slice_body(cube(3), Subspace.coordinate(3, [0]), [1.0])


def test_product_ball_pairing():
    with pytest.raises(UnsupportedError):
        project_body(product_ball(3, 1), Subspace.coordinate(3, [1]))


# -------------------------------------------------------------- invariants --

@pytest.mark.parametrize("a,b,inv", [
    ([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 0], "origin_interior"),
    ([[1, 0], [-1, 0], [0, 1]], [1, 1, 1], "bounded"),
    ([[1, 0], [1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1, 1], "no_duplicate_facets"),
    ([[np.nan, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1], "finite"),
])
def test_hpolytope_invariants(a, b, inv):
    with pytest.raises(InvariantError) as err:
        HPolytope.from_inequalities(a, b)
    assert err.value.invariant == inv


def test_rows_normalised_on_load():
    p = HPolytope.from_inequalities([[2, 0], [-1, 0], [0, 3], [0, -1]], [2, 1, 3, 1])
    assert np.allclose(np.linalg.norm(p.normals, axis=1), 1) and np.allclose(p.offsets, 1)


def test_subspace_invariants():
    with pytest.raises(InvariantError):
        Subspace.from_basis([[1, 0, 0], [1, 1e-3, 0]])
    with pytest.raises(InvariantError):
        Subspace.coordinate(3, [0, 1, 2])
    L = Subspace.from_basis([[1, 1, 0], [0, 0, 2]], orthonormalize=True)
    assert np.allclose(L.basis @ L.basis.T, np.eye(2), atol=1e-12)
    assert np.allclose(L.complement @ L.basis.T, 0, atol=1e-12)


def test_vpolytope_invariants():
    with pytest.raises(InvariantError):
        vpolytope("flat", [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])
    with pytest.raises(InvariantError):
        vpolytope("offcentre", [[1, 1], [2, 1], [1, 2]])


def test_body_file_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"name": "x", "dim": 2, "kind": "hpolytope", "A": [[1,0],[-1,0],[0,1]], "b": [1,1,1]}')
    with pytest.raises(BodyFileError) as err:
        load_body(str(p))
    assert err.value.invariant == "bounded"
    with pytest.raises(BodyFileError):
        body_from_dict({"name": "x", "dim": 2, "kind": "torus"})


@pytest.mark.parametrize("body", [cube(3), shifted_cube(3, 0.3), random_tangent(3, 9, 4),
                                  product_ball(3, 1)], ids=lambda b: b.name)
def test_body_roundtrip(tmp_path, body):
    path = tmp_path / "b.json"
    save_body(body, str(path))
    back = load_body(str(path))
    d0, d1 = body_to_dict(body), body_to_dict(back)
    assert d0.keys() == d1.keys()
    for key in ("A", "b"):
        if key in d0:
            assert np.max(np.abs(np.array(d0[key]) - np.array(d1[key]))) <= 1e-15


# -------------------------------------------------------------- properties --

@pytest.mark.parametrize("body", [cube(3), shifted_cube(3, 0.3), random_tangent(3, 10, 2),
                                  simplex_centered(3), cross_polytope(3)], ids=lambda b: b.name)
def test_radial_boundary_and_gauss_consistency(body):
    U, _ = sphere_rule(3, 12)
    rho = radial_many(body, U)
    assert np.all(body.contains((rho - 1e-9)[:, None] * U))
    assert not np.any(body.contains((rho + 1e-6)[:, None] * U))
    nu, uniq, _ = radial_gauss_many(body, U)
    pts = rho[:, None] * U
    h = support_many(body, nu)
    ok = uniq
    assert np.allclose(np.sum(nu[ok] * pts[ok], axis=1), h[ok], atol=1e-9)


@given(directions, st.sampled_from([0.5, 2.0]))
def test_radial_homogeneity(v, alpha):
    body = shifted_cube(3, 0.3)
    x = np.asarray(v)
    assert np.isclose(radial_extended(body, alpha * x), radial_extended(body, x) / alpha, rtol=1e-12)


@given(directions, directions)
def test_support_sublinear(u, v):
    body = random_tangent(3, 10, 3)
    u, v = np.asarray(u), np.asarray(v)
    assert support(body, u + v) <= support(body, u) + support(body, v) + 1e-12


@pytest.mark.parametrize("body", [shifted_cube(3, 0.3), simplex_centered(3), random_tangent(3, 10, 1)],
                         ids=lambda b: b.name)
def test_asymmetry_containment(body):
    g = asymmetry_constant(body).gamma
    U, _ = sphere_rule(3, 24)  # ~10^3 boundary samples
    bnd = np.vstack([radial_many(body, U)[:, None] * U, body.hrep().vertices])
    assert len(bnd) >= 1000
    assert np.all(body.contains(-g * bnd, 1e-9))
    assert not np.all(body.contains(-(g + 1e-3) * bnd, 1e-12))


@pytest.mark.parametrize("body", [cube(3), cross_polytope(3), product_ball(3, 1)], ids=lambda b: b.name)
def test_symmetric_gamma_is_one(body):
    assert asymmetry_constant(body).gamma == 1.0


def test_containment_bisection_oracle():
    assert abs(containment_bisection(shifted_cube(2, 0.5)) - 1 / 3) <= 1e-6


@given(st.floats(-0.95, 0.95))
def test_projection_slice_consistency(x):
    body = random_tangent(3, 10, 0)
    L = Subspace.coordinate(3, [1])
    proj = project_body(body, L)
    lo, hi = proj.hrep().vertices.min(), proj.hrep().vertices.max()
    t = lo + (x + 1) / 2 * (hi - lo)
    if lo + 1e-6 < t < hi - 1e-6:
        assert slice_body(body, L, [t]).measure() > 0
    outside = hi + 0.1 + abs(x)
    assert not proj.contains([[outside]])[0]
    with pytest.raises(DomainError):
        slice_body(body, L, [outside])


@pytest.mark.parametrize("body", [cube(3), random_tangent(3, 12, 5), cube(4), simplex_centered(4)],
                         ids=lambda b: b.name)
def test_volume_against_delaunay(body):
    assert np.isclose(volume(body), delaunay_volume(body.hrep().vertices), rtol=1e-10)


def test_scale_and_centre():
    body = random_tangent(3, 10, 7)
    assert np.isclose(volume(scale(body, 2.0)), 8 * volume(body), rtol=1e-10)
    assert np.allclose(centroid(centered(body)), 0, atol=1e-12)
