import numpy as np
import pytest
from scipy import integrate

from dualcurv.exceptions import ConfigError, DomainError, OpenRangeError
from dualcurv.generators import cross_polytope, cube, random_tangent, shifted_cube, simplex_centered
from dualcurv.geometry import Subspace, asymmetry_constant, product_ball, scale
from dualcurv.measures import PhiSpec
from dualcurv.slicing import (
    FDSpec, default_levels, extrapolate, g_gradient_dot, g_value, g_values, gradient_bound_check,
    gradient_bound_constant, gradient_integral, radial_grid, ray_integrals, slice_profile,
)

E1 = Subspace.coordinate(3, [0])

# scipy.quad of (0.25 + t^2)^(-1/4) over [-1, 1]
CUBE2_G = 2.3839075727381518
# scipy.dblquad of (0.25 + s^2 + t^2)^(-1/4) over [-1, 1]^2
CUBE3_G = 4.2456004402369079


def interior_point(body, L, frac=0.5, i=0):
    return L.project(frac * body.hrep().vertices[i])


def mc_slice(body, L, phi, x, n_samples=200_000, seed=11):
    """Rejection sampling over a box around the slice; returns (estimate, stderr)."""
    H = body.hrep()
    comp = np.asarray(L.complement)
    foot = L.embed(x)
    R = np.max(np.linalg.norm(H.vertices, axis=1))
    d = comp.shape[0]
    rng = np.random.default_rng(seed)
    W = rng.uniform(-R, R, size=(n_samples, d))
    Z = foot + W @ comp
    inside = np.all(Z @ H.normals.T <= H.offsets, axis=1)
    f = np.where(inside, np.linalg.norm(Z, axis=1) ** (phi.q - body.dim), 0.0)
    box = (2 * R) ** d
    return box * f.mean(), box * f.std(ddof=1) / np.sqrt(n_samples)


# ---------------------------------------------------------------- examples --

@pytest.mark.parametrize("x", [-0.7, 0.0, 0.3, 0.9])
def test_cube_slice_area(x):
    assert g_value(cube(3), E1, PhiSpec(3.0), [x]) == pytest.approx(4.0, rel=1e-13)


@pytest.mark.parametrize("q", [1.5, 2.5, 4.0])
def test_product_ball_at_origin(q):
    exact = 2 * np.pi / (q - 1)  # (n - k) vol(B_2) / (q - k)
    assert g_value(product_ball(3, 1), E1, PhiSpec(q), [0.0]) == pytest.approx(exact, rel=1e-12)


def test_product_ball_off_origin():
    q, x = 2.5, 0.4
    ref = 2 * np.pi * integrate.quad(lambda r: (x * x + r * r) ** ((q - 3) / 2) * r, 0, 1, epsabs=0, epsrel=1e-13)[0]
    assert g_value(product_ball(3, 1), E1, PhiSpec(q), [x]) == pytest.approx(ref, rel=1e-12)


def test_frozen_slice_values():
    assert g_value(cube(2), Subspace.coordinate(2, [0]), PhiSpec(1.5), [0.5]) == pytest.approx(CUBE2_G, rel=1e-12)
    assert g_value(cube(3), E1, PhiSpec(2.5), [0.5]) == pytest.approx(CUBE3_G, rel=1e-10)


def test_ray_integrals_against_quad():
    phi = PhiSpec(2.5)
    foot = np.array([[0.3, 0.0, 0.0]])
    u = np.array([[0.0, 0.6, 0.8]])
    got = ray_integrals(phi, 3, 1, foot, u, np.array([1.7]))[0]
    ref = integrate.quad(lambda r: (0.09 + r * r) ** (-0.25) * r, 0, 1.7, epsabs=0, epsrel=1e-13)[0]
    assert got == pytest.approx(ref, rel=1e-12)


def test_slice_errors():
    with pytest.raises(DomainError, match="diverge"):
        g_value(cube(3), E1, PhiSpec(1.0), [0.2])
    with pytest.raises(DomainError):
        g_value(cube(3), E1, PhiSpec(2.5), [1.2])
    assert np.isnan(g_values(cube(3), E1, PhiSpec(2.5), [[1.2], [0.5]])[0])


def test_gradient_examples():
    assert g_gradient_dot(cube(3), E1, PhiSpec(3.0), [0.5]) == pytest.approx(0.0, abs=1e-9)
    box = shifted_cube(2, 0.6)  # [-0.4, 1.6] x [-1, 1]
    assert g_gradient_dot(box, Subspace.coordinate(2, [0]), PhiSpec(2.0), [0.5]) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(DomainError, match="x = 0"):
        g_gradient_dot(cube(3), E1, PhiSpec(2.5), [0.0])
    with pytest.raises(DomainError):
        g_gradient_dot(cube(3), E1, PhiSpec(2.5), [1.0])


def test_central_scheme_refuses_boundary():
    x = [1.0 - 5e-5]
    assert np.isfinite(g_gradient_dot(cube(3), E1, PhiSpec(2.5), x))
    with pytest.raises(DomainError, match="central"):
        g_gradient_dot(cube(3), E1, PhiSpec(2.5), x, FDSpec(scheme="central"))


@pytest.mark.parametrize("body", [cube(3), cross_polytope(3)], ids=lambda b: b.name)
@pytest.mark.parametrize("q", [1.5, 2.5])
def test_symmetric_body_low_q_gradient_nonpositive(body, q):
    for L in (E1, Subspace.coordinate(3, [0, 1])):
        if q <= L.k:
            continue
        X = radial_grid(body, L, points=8)
        vals = [g_gradient_dot(body, L, PhiSpec(q), x) for x in X]
        assert max(vals) <= 1e-6


def test_fd_spec_validation():
    with pytest.raises(ConfigError):
        FDSpec(rel_step=0.1)
    with pytest.raises(ConfigError):
        FDSpec(scheme="backward")


# ------------------------------------------------------------- MC oracle ----

def _oracle_cases():
    rng = np.random.default_rng(2024)
    cases = []
    for i in range(20):
        body = random_tangent(3, int(rng.integers(8, 14)), seed=i)
        k = int(rng.integers(1, 3))
        L = Subspace.from_basis(rng.normal(size=(k, 3)), orthonormalize=True)
        q = float(rng.uniform(k + 0.3, 5.5))
        frac = float(rng.uniform(0.2, 0.8))
        cases.append((body, L, q, frac, i))
    return cases


@pytest.mark.parametrize("case", _oracle_cases(), ids=lambda c: f"case{c[4]}")
def test_g_matches_rejection_sampling(case):
    body, L, q, frac, i = case
    x = interior_point(body, L, frac, i % len(body.hrep().vertices))
    est, se = mc_slice(body, L, PhiSpec(q), x, seed=100 + i)
    assert abs(g_value(body, L, PhiSpec(q), x) - est) <= 3 * se


# -------------------------------------------------------------- properties --

@pytest.mark.parametrize("body", [cube(3), simplex_centered(3), random_tangent(3, 10, 0), random_tangent(3, 12, 4)],
                         ids=lambda b: b.name)
@pytest.mark.parametrize("k", [1, 2])
def test_scaling_homogeneity(body, k):
    L = Subspace.coordinate(3, range(k))
    q = 2.7
    x = interior_point(body, L, 0.4, 1)
    a = g_value(scale(body, 2.0), L, PhiSpec(q), 2 * x)
    assert a == pytest.approx(2 ** (q - k) * g_value(body, L, PhiSpec(q), x), rel=1e-8)


@pytest.mark.parametrize("body", [shifted_cube(3, 0.3), simplex_centered(3), random_tangent(3, 10, 2)],
                         ids=lambda b: b.name)
def test_fd_step_halving(body):
    L = E1
    phi = PhiSpec(2.5)
    X = radial_grid(body, L, points=10, margin=0.1)
    for x in X:
        if abs(x[0]) < 0.1 * 2:
            continue
        a = g_gradient_dot(body, L, phi, x, FDSpec(1e-4))
        b = g_gradient_dot(body, L, phi, x, FDSpec(5e-5))
        assert abs(a - b) <= 1e-3 * max(abs(a), 1e-12) + 1e-9


@pytest.mark.parametrize("body", [cube(3), simplex_centered(3), random_tangent(3, 10, 1)], ids=lambda b: b.name)
def test_continuity_heuristic(body):
    L = Subspace.coordinate(3, [0, 1])
    phi = PhiSpec(3.5)
    X = radial_grid(body, L, points=6)
    g = g_values(body, L, phi, X)
    g8 = g_values(body, L, phi, np.exp(-1 / 8) * X)
    g16 = g_values(body, L, phi, np.exp(-1 / 16) * X)
    bad = np.abs(g16 - g) > 10 * np.abs(g8 - g) + 1e-14
    assert bad.mean() <= 0.05


def test_slice_profile_flags_boundary():
    prof = slice_profile(cube(3), E1, PhiSpec(2.5), grid=16)
    rows = list(prof.rows())
    assert len(rows) > 0 and all(len(r) == 4 for r in rows)
    assert all(r[0] != 0.0 for r in rows)


# ------------------------------------------------------ gradient integral ---

def test_gradient_integral_cube_q3_zero():
    gi = gradient_integral(cube(3), E1, PhiSpec(3.0))
    assert np.allclose(gi.values, 0.0, atol=1e-8) and abs(gi.extrapolated) < 1e-8
    assert gi.levels == (4, 8, 16)


def test_gradient_integral_cross_polytope_nonpositive():
    gi = gradient_integral(cross_polytope(3), E1, PhiSpec(3.0))
    assert max(gi.values) <= 1e-9 and gi.extrapolated <= 1e-9


def test_gradient_integral_product_ball():
    gi = gradient_integral(product_ball(3, 1), E1, PhiSpec(2.5), levels=(4, 8, 16))
    d = np.diff(gi.values)
    assert np.all(d > 0) or np.all(d < 0)
    # the limit predicted by the ratio: n C(S) (rat - k/q)
    from dualcurv.measures import QuadratureSpec, concentration_ratio
    rep = concentration_ratio(product_ball(3, 1), PhiSpec(2.5), E1, QuadratureSpec("product", 200_000))
    limit = 3 * rep.total * (rep.ratio - 1 / 2.5)
    assert gi.extrapolated == pytest.approx(limit, rel=1e-2)


def test_gradient_integral_slice_mass():
    from dualcurv.measures import total_measure
    body, phi = shifted_cube(3, 0.3), PhiSpec(2.5)
    gi = gradient_integral(body, E1, phi)
    assert gi.slice_mass == pytest.approx(3 / 2.5 * total_measure(body, phi), rel=1e-6)


def test_gradient_integral_config_and_range():
    with pytest.raises(ConfigError):
        gradient_integral(cube(3), E1, PhiSpec(2.5), levels=(1,), grid=4)
    with pytest.raises(ConfigError):
        gradient_integral(cube(3), E1, PhiSpec(2.5), levels=(8, 4))
    with pytest.raises(DomainError):
        gradient_integral(cube(3), E1, PhiSpec(1.8))
    gi = gradient_integral(cube(3), E1, PhiSpec(1.8), allow_low_q=True)
    assert gi.tags and "outside proven range" in gi.tags[0]


def test_three_dimensional_projection_uses_mc():
    body = random_tangent(4, 14, 0)
    gi = gradient_integral(body, Subspace.coordinate(4, [0, 1, 2]), PhiSpec(5.0), levels=(4, 8), mc_points=2000)
    assert gi.n_points >= 100 and np.isfinite(gi.extrapolated)


def test_extrapolation_models():
    s = np.exp(-1 / np.array([4.0, 8.0, 16.0]))
    gap = 1 - s
    vals = 2.0 + 3.0 * gap - 5.0 * gap**2
    assert extrapolate(s, vals, "quadratic") == pytest.approx(2.0, abs=1e-12)
    lin = 2.0 + 3.0 * gap
    assert extrapolate(s, lin, "linear") == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ConfigError):
        extrapolate(s, vals, "cubic")
    assert default_levels(64) == (4, 8, 16) and default_levels(128) == (8, 16, 32)


# -------------------------------------------------------- gradient bounds ---

def test_gradient_bound_constant_example():
    gamma = asymmetry_constant(shifted_cube(3, 0.3)).gamma
    assert gamma == pytest.approx(7 / 13, abs=1e-12)
    c, branch = gradient_bound_constant(3, 1, 4.5, gamma)
    assert c == pytest.approx(2.1, abs=1e-12) and branch == "convex"
    assert gradient_bound_constant(3, 1, 2.5, 1.0) == (0.0, "quasiconcave")
    with pytest.raises(OpenRangeError, match="quasiconvex"):
        gradient_bound_constant(3, 1, 3.5, 1.0)
    with pytest.raises(DomainError):
        gradient_bound_constant(3, 1, 1.0, 1.0)


def test_gradient_bound_check_shifted_cube():
    body = shifted_cube(3, 0.3)
    res = gradient_bound_check(body, E1, PhiSpec(4.5), 7 / 13)
    assert res.constant == pytest.approx(2.1) and res.worst <= 1e-3 and res.n_points == 64


@pytest.mark.parametrize("q", [2.5, 3.0])
def test_gradient_bound_check_symmetric(q):
    res = gradient_bound_check(cube(3), Subspace.coordinate(3, [0, 1]), PhiSpec(q), 1.0)
    assert res.constant == 0.0 and res.worst <= 1e-3
