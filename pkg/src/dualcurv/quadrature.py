"""Quadrature rules: Gauss-Legendre panels, collapsed simplex rules, sphere rules."""
from functools import lru_cache
from math import factorial, gamma, pi

import numpy as np


@lru_cache(maxsize=None)
def _leggauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(a, b, order):
    """Nodes and weights of the ``order``-point Gauss-Legendre rule on [a, b]."""
    x, w = _leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gauss(breaks, order):
    """Gauss-Legendre rule on every panel between consecutive ``breaks``."""
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b > a:
            x, w = gauss_legendre(a, b, order)
            nodes.append(x)
            weights.append(w)
    if not nodes:
        return np.empty(0), np.empty(0)
    return np.concatenate(nodes), np.concatenate(weights)


@lru_cache(maxsize=None)
def unit_panels(panels, order):
    """Composite rule on [0, 1] with ``panels`` equal panels (read-only arrays)."""
    x, w = composite_gauss(np.linspace(0.0, 1.0, panels + 1), order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def simplex_rule(dim, order):
    """Collapsed (Duffy) tensor Gauss rule on the unit simplex.

    Returns barycentric coordinates of shape ``(N, dim+1)`` and weights that
    sum to one, so integrating over a physical simplex is
    ``vol(S) * sum(w * f(bary @ vertices))``. Nodes never touch the
    faces of the simplex.
    """
    if dim == 0:
        return np.ones((1, 1)), np.ones(1)
    x, w = _leggauss(order)
    t = 0.5 * (x + 1.0)
    wt = 0.5 * w
    grids = np.meshgrid(*([t] * dim), indexing="ij")
    wgrids = np.meshgrid(*([wt] * dim), indexing="ij")
    s = [g.ravel() for g in grids]
    weight = np.prod([g.ravel() for g in wgrids], axis=0)
    # map the cube to the simplex by successive collapsing
    lam = np.zeros((s[0].size, dim + 1))
    remaining = np.ones(s[0].size)
    for j in range(dim):
        lam[:, j] = remaining * s[j]
        weight = weight * remaining
        remaining = remaining * (1.0 - s[j])
    lam[:, dim] = remaining
    weight = weight * factorial(dim)
    lam.setflags(write=False)
    weight.setflags(write=False)
    return lam, weight


def simplex_volume(points):
    """``d``-volume of the simplex spanned by ``d+1`` points in any ambient dimension."""
    points = np.asarray(points, dtype=float)
    d = points.shape[0] - 1
    if d == 0:
        return 1.0
    edges = points[1:] - points[0]
    if edges.shape[0] == edges.shape[1]:
        # the Gram form squares the condition number of thin simplices
        return float(abs(np.linalg.det(edges)) / factorial(d))
    gram = edges @ edges.T
    det = np.linalg.det(gram)
    return float(np.sqrt(max(det, 0.0)) / factorial(d))


def sphere_area(n):
    """Surface area of the unit sphere in R^n."""
    return 2.0 * pi ** (n / 2.0) / gamma(n / 2.0)


def ball_volume(n):
    """Volume of the unit ball in R^n."""
    return pi ** (n / 2.0) / gamma(n / 2.0 + 1.0)


def circle_rule(count, offset=0.0):
    """Trapezoid rule on the unit circle: directions ``(count, 2)`` and angle weights."""
    theta = offset + 2.0 * pi * (np.arange(count) + 0.5) / count
    return np.column_stack([np.cos(theta), np.sin(theta)]), np.full(count, 2.0 * pi / count)


def sphere_rule(dim, resolution):
    """Deterministic rule on S^{dim-1} for dim in {1, 2, 3}.

    Weights sum to the surface area. ``dim == 1`` returns the two unit
    "directions" with unit weight (counting measure on S^0).
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    if dim == 2:
        return circle_rule(max(8, 2 * resolution))
    if dim == 3:
        c, wc = gauss_legendre(-1.0, 1.0, max(4, resolution))
        dirs2, wphi = circle_rule(max(8, 2 * resolution))
        s = np.sqrt(1.0 - c**2)
        u = np.concatenate([np.column_stack([s * d[0], s * d[1], c]) for d in dirs2])
        w = np.concatenate([wc * wp for wp in wphi])
        return u, w
    raise ValueError(f"sphere_rule supports dim <= 3, got {dim}")
