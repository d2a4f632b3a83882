"""Dual curvature measures: total mass, subspace mass and concentration ratio.

Three quadrature routes are available:

``facet``
    Sum over facets ``F`` of ``(h_F / n) * int_F phi`` (polytopes, ``q > 0``).
``product``
    Deterministic product rule on the sphere (n in {2, 3}).
``mc``
    Uniform sphere samples from the counter-based stream in :mod:`dualcurv.rng`.
"""
from dataclasses import dataclass, field
from math import ceil, pi, sqrt
from typing import Callable, Optional

import numpy as np

from .exceptions import ConfigError, DomainError, UnsupportedError
from .geometry import radial_gauss_many, radial_many
from .geometry.bodies import Ball, ProductBall
from .quadrature import composite_gauss, gauss_legendre, simplex_rule, simplex_volume, sphere_area
from .rng import chunked_sums

NORMAL_TOL = 1e-9
FLAG_WARN = 1e-3
FACET_RTOL = 1e-8


@dataclass(frozen=True)
class PhiSpec:
    """Integrand ``phi(x) = |x|^(q-n) * sphere_fn(x/|x|)``.

    ``sphere_fn`` maps an ``(N, n)`` array of unit vectors to ``N`` positive
    values; ``None`` means the constant 1 (the ordinary dual curvature
    measure). Lipschitz continuity of a user supplied ``sphere_fn`` is
    taken on trust.
    """

    q: float
    sphere_fn: Optional[Callable] = field(default=None, compare=False)
    name: str = "euclidean"

    def __post_init__(self):
        if not np.isfinite(self.q):
            raise DomainError("q must be finite")
        if self.sphere_fn is None and self.name != "euclidean":
            raise ConfigError("a non-euclidean phi needs a sphere_fn")

    @property
    def is_euclidean(self):
        return self.sphere_fn is None

    def degree(self, n):
        return self.q - n

    def on_sphere(self, U):
        U = np.atleast_2d(U)
        if self.sphere_fn is None:
            return np.ones(U.shape[0])
        vals = np.asarray(self.sphere_fn(U), dtype=float).reshape(U.shape[0])
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise DomainError(f"sphere_fn of phi {self.name!r} must be finite and positive")
        return vals

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        r = np.linalg.norm(X, axis=1)
        return r ** (self.q - X.shape[1]) * self.on_sphere(X / r[:, None])


@dataclass(frozen=True)
class QuadratureSpec:
    method: str = "auto"
    samples: int = 200_000
    seed: int = 0
    order: int = 8

    def __post_init__(self):
        if self.method not in ("auto", "mc", "product", "facet"):
            raise ConfigError(f"unknown quadrature method {self.method!r}")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.order < 1:
            raise ConfigError("order must be >= 1")


@dataclass(frozen=True)
class MeasureReport:
    total: float
    subspace_mass: float
    ratio: float
    stderr_total: float
    stderr_sub: float
    method: str
    flagged_fraction: float = 0.0
    stderr_ratio: float = 0.0
    warnings: tuple = ()

    def to_dict(self, body_name, phi, L):
        return {
            "body": body_name,
            "q": float(phi.q),
            "phi": phi.name,
            "L": L.basis.tolist(),
            "total": self.total,
            "subspace": self.subspace_mass,
            "ratio": self.ratio,
            "stderr": {"total": self.stderr_total, "subspace": self.stderr_sub, "ratio": self.stderr_ratio},
            "method": self.method,
            "flagged_fraction": self.flagged_fraction,
        }


# ------------------------------------------------------------ facet route ---

def _simplex_integral(simplices, phi, order):
    dim = simplices[0].shape[0] - 1
    lam, w = simplex_rule(dim, order)
    total = 0.0
    for s in simplices:
        pts = lam @ s
        total += simplex_volume(s) * float(w @ phi(pts))
    return total


def _subdivide(s):
    """Split a segment into 2 or a triangle into 4 congruent pieces."""
    if s.shape[0] == 2:
        m = 0.5 * (s[0] + s[1])
        return [np.array([s[0], m]), np.array([m, s[1]])]
    a, b, c = s
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    return [np.array(t) for t in ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))]


def facet_integral(facet, phi, order=8):
    """``int_F phi dH^{n-1}`` with order escalation and, if needed, subdivision."""
    if not facet.simplices:
        return 0.0
    if phi.is_euclidean and phi.q == facet.normal.size:
        return facet.volume
    simplices = list(facet.simplices)
    dim = simplices[0].shape[0] - 1
    if dim == 0:
        return float(phi(simplices[0])[0])
    cap = 64 if dim <= 2 else 16
    prev = _simplex_integral(simplices, phi, order)
    for _ in range(6):
        o = order
        while o < cap:
            o = min(2 * o, cap)
            cur = _simplex_integral(simplices, phi, o)
            if abs(cur - prev) <= FACET_RTOL * abs(cur):
                return cur
            prev = cur
        if dim > 2:
            return prev
        simplices = [t for s in simplices for t in _subdivide(s)]
        prev = _simplex_integral(simplices, phi, order)
    return prev


def _require_facet_route(body, phi):
    if not body.is_polytope:
        raise UnsupportedError("facet representation needs a polytope")
    if phi.q <= 0:
        raise UnsupportedError("facet representation holds for q > 0 only; use the spherical method")


def facet_masses(body, phi, order=8):
    """Per-facet masses ``(h_F / n) int_F phi`` of a polytope."""
    _require_facet_route(body, phi)
    n = body.dim
    return np.array([f.offset / n * facet_integral(f, phi, order) for f in body.hrep().facets])


def subspace_measure_facet(body, phi, L, order=8):
    """Mass of ``S^{n-1} cap L`` from the facets whose normals lie in L."""
    _require_facet_route(body, phi)
    n = body.dim
    total = 0.0
    for f in body.hrep().facets:
        if L.distance(f.normal)[0] <= NORMAL_TOL:
            total += f.offset / n * facet_integral(f, phi, order)
    return total


# -------------------------------------------------------- spherical route ---

def _integrand(body, phi, L, U):
    """Columns: phi * rho^q, same times 1[normal in L], non-unique flag."""
    rho = radial_many(body, U)
    f = phi.on_sphere(U) * rho**phi.q
    cols = [f]
    if L is not None:
        nu, unique, _ = radial_gauss_many(body, U)
        ind = L.contains(nu, NORMAL_TOL)
        if isinstance(body.shape, Ball):
            ind = np.zeros(len(U), dtype=bool)
        cols += [f * ind, (~unique).astype(float)]
    return np.column_stack(cols)


def _product_nodes_2d(body, order, samples):
    breaks = [0.0, 2 * pi]
    if body.is_polytope:
        v = body.hrep().vertices
        breaks += list(np.mod(np.arctan2(v[:, 1], v[:, 0]), 2 * pi))
    elif isinstance(body.shape, ProductBall):
        breaks += [pi / 4 + j * pi / 2 for j in range(4)]
    breaks = np.unique(np.array(breaks))
    per = max(1, ceil(sqrt(samples) / order / (len(breaks) - 1)))
    fine = np.unique(np.concatenate([np.linspace(a, b, per + 1) for a, b in zip(breaks[:-1], breaks[1:])]))
    th, w = composite_gauss(fine, order)
    return np.column_stack([np.cos(th), np.sin(th)]), w


def _product_nodes_3d(body, order, samples):
    axis = 2
    breaks = [0.0, pi]
    if isinstance(body.shape, ProductBall):
        axis = 0 if body.shape.k == 1 else 2
        breaks += [pi / 4, 3 * pi / 4]
    n_polar = max(order, int(round(sqrt(samples / 2.0))))
    n_az = max(8, 2 * n_polar)
    per = max(1, ceil(n_polar / order / (len(breaks) - 1)))
    breaks = np.unique(np.array(breaks))
    fine = np.unique(np.concatenate([np.linspace(a, b, per + 1) for a, b in zip(breaks[:-1], breaks[1:])]))
    th, wt = composite_gauss(fine, order)
    ph = 2 * pi * (np.arange(n_az) + 0.5) / n_az
    T, P = np.meshgrid(th, ph, indexing="ij")
    W = np.outer(wt * np.sin(th), np.full(n_az, 2 * pi / n_az))
    c, s = np.cos(T).ravel(), np.sin(T).ravel()
    others = [i for i in range(3) if i != axis]
    U = np.empty((c.size, 3))
    U[:, axis] = c
    U[:, others[0]] = s * np.cos(P).ravel()
    U[:, others[1]] = s * np.sin(P).ravel()
    return U, W.ravel()


def product_nodes(body, quad):
    n = body.dim
    if n == 2:
        return _product_nodes_2d(body, quad.order, quad.samples)
    if n == 3:
        return _product_nodes_3d(body, quad.order, quad.samples)
    raise ConfigError("product quadrature is available for n in {2, 3} only")


def _spherical(body, phi, L, quad):
    """(total, subspace, se_total, se_sub, se_ratio, flagged_fraction, method)."""
    n = body.dim
    method = quad.method
    if method in ("auto", "facet"):
        method = "product" if n in (2, 3) else "mc"
    if method == "product":
        U, w = product_nodes(body, quad)
        vals = _integrand(body, phi, L, U)
        tot = float(w @ vals[:, 0]) / n
        if L is None:
            return tot, 0.0, 0.0, 0.0, 0.0, 0.0, "product"
        sub = float(w @ vals[:, 1]) / n
        flagged = float(w @ vals[:, 2]) / float(w.sum())
        return tot, sub, 0.0, 0.0, 0.0, flagged, "product"
    N = quad.samples
    s1, s2 = chunked_sums(lambda U: _integrand(body, phi, L, U), N, quad.seed, n)
    c = sphere_area(n) / n
    mean_f = s1[0] / N
    var_f = max(s2[0] / N - mean_f**2, 0.0)
    tot, se_tot = c * mean_f, c * sqrt(var_f / N)
    if L is None:
        return tot, 0.0, se_tot, 0.0, 0.0, 0.0, "mc"
    mean_g = s1[1] / N
    var_g = max(s2[1] / N - mean_g**2, 0.0)
    # E[f * g] = E[g^2 / 1] since g = f * indicator
    cov = s2[1] / N - mean_f * mean_g
    ratio = mean_g / mean_f if mean_f > 0 else 0.0
    var_ratio = (var_g - 2 * ratio * cov + ratio**2 * var_f) / (mean_f**2 * N) if mean_f > 0 else 0.0
    return (tot, c * mean_g, se_tot, c * sqrt(var_g / N), sqrt(max(var_ratio, 0.0)),
            s1[2] / N, "mc")


def total_measure(body, phi, quad=None):
    """``(1/n) int_{S^{n-1}} phi(u) rho_K(u)^q du``."""
    quad = quad or QuadratureSpec()
    if _use_facets(body, phi, quad):
        return float(np.sum(facet_masses(body, phi, quad.order)))
    return _spherical(body, phi, None, quad)[0]


def total_measure_report(body, phi, quad=None):
    """``(total, stderr, method)`` for the route :func:`total_measure` takes."""
    quad = quad or QuadratureSpec()
    if _use_facets(body, phi, quad):
        return float(np.sum(facet_masses(body, phi, quad.order))), 0.0, "facet"
    tot, _, se, _, _, _, method = _spherical(body, phi, None, quad)
    return tot, se, method


def subspace_measure_spherical(body, phi, L, quad=None):
    """Spherical integral of ``phi rho^q`` over directions whose normal lies in L.

    Returns ``(mass, stderr, flagged_fraction)``.
    """
    quad = quad or QuadratureSpec(method="mc")
    _, sub, _, se_sub, _, flagged, _ = _spherical(body, phi, L, quad)
    return sub, se_sub, flagged


def _use_facets(body, phi, quad):
    if quad.method == "facet" or quad.method == "auto":
        return body.is_polytope and phi.q > 0
    return False


def concentration_ratio(body, phi, L, quad=None):
    """``C(S cap L) / C(S)`` with matched methods for numerator and denominator."""
    quad = quad or QuadratureSpec()
    if L.n != body.dim:
        raise DomainError(f"subspace lives in R^{L.n}, body in R^{body.dim}")
    if _use_facets(body, phi, quad):
        masses = facet_masses(body, phi, quad.order)
        total = float(np.sum(masses))
        in_l = np.array([L.distance(f.normal)[0] <= NORMAL_TOL for f in body.hrep().facets])
        sub = float(np.sum(masses[in_l]))
        if not total > 0:
            raise DomainError("total measure must be positive")
        return MeasureReport(total, sub, sub / total, 0.0, 0.0, "facet")
    tot, sub, se_t, se_s, se_r, flagged, method = _spherical(body, phi, L, quad)
    if not tot > 0:
        raise DomainError("total measure must be positive")
    warnings = ()
    if flagged >= FLAG_WARN:
        warnings = (f"non-unique normal fraction {flagged:.3g} exceeds {FLAG_WARN:g}",)
    return MeasureReport(tot, sub, min(max(sub / tot, 0.0), 1.0), se_t, se_s, method, flagged, se_r, warnings)
