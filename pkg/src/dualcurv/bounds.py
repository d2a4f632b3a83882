"""Upper bounds for the subspace concentration ratio and their verification.

The general bound for a body with ``gamma (-K) subset K`` and ``c = (1-gamma)/(1+gamma)``::

    (k + c (q - k)) / q                  k + 1 < q <= n
    ((k + q - n) + c (n - k)) / q        q > n + 1

Nothing is known for ``q`` in ``(n, n + 1]``; such rows carry no bound.
"""
import enum
from dataclasses import dataclass, field
from math import isclose
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import ConvexHull

from . import generators
from .exceptions import ConfigError, DomainError, OpenRangeError, UnsupportedError
from .geometry import Section, Subspace, asymmetry_constant, centroid
from .geometry.bodies import Ball, ProductBall
from .measures import PhiSpec, QuadratureSpec, concentration_ratio
from .slicing import section_integral

PASS_TOL = 5e-3
GAMMA_ONE_TOL = 1e-12
CENTERED_TOL = 1e-9


class BoundKind(str, enum.Enum):
    GENERAL_LOW_Q = "general_low_q"
    GENERAL_HIGH_Q = "general_high_q"
    EVEN_LOW_Q = "even_low_q"
    EVEN_HIGH_Q = "even_high_q"
    CONE_VOLUME = "cone_volume"
    CENTERED_COROLLARY = "centered_corollary"


def _open_band(n, q):
    return n < q <= n + 1


def theorem_bound(n, k, q, gamma=1.0, kind=BoundKind.GENERAL_LOW_Q):
    """Closed-form bound on ``rat(C_q(K), L)`` for ``dim L = k``.

    ``gamma`` is ignored by the even kinds (which assume 1) and by
    ``centered_corollary`` (which uses 1/n). The general formulas are
    evaluated for any ``q > k``; they are proven only for ``q > k + 1``,
    which is the window :func:`select_kind` uses.
    """
    kind = BoundKind(kind)
    if not 1 <= k < n:
        raise DomainError(f"dim L = {k} must lie in [1, {n - 1}]")
    if not 0 < gamma <= 1:
        raise DomainError("gamma must lie in (0, 1]")
    if kind is BoundKind.CONE_VOLUME:
        if q != n:
            raise DomainError("cone_volume bound needs q = n")
        return k / n
    if kind is BoundKind.EVEN_LOW_Q:
        if not 0 < q <= n:
            raise DomainError("even_low_q bound needs 0 < q <= n")
        return min(k / q, 1.0)
    if _open_band(n, q):
        raise OpenRangeError(f"q = {q:g} in (n, n+1] = ({n}, {n + 1}]: no bound is known in this open range")
    if kind is BoundKind.EVEN_HIGH_Q:
        if not q > n + 1:
            raise DomainError("even_high_q bound needs q > n + 1")
        return (k + q - n) / q
    if kind is BoundKind.CENTERED_COROLLARY:
        gamma = 1.0 / n
    if not q > k:
        raise DomainError(f"general bound needs q > dim L = {k}")
    c = (1.0 - gamma) / (1.0 + gamma)
    if kind is BoundKind.GENERAL_LOW_Q and q > n:
        raise DomainError("general_low_q bound needs q <= n")
    if kind is BoundKind.GENERAL_HIGH_Q and q <= n + 1:
        raise DomainError("general_high_q bound needs q > n + 1")
    if q <= n:
        return (k + c * (q - k)) / q
    return ((k + q - n) + c * (n - k)) / q


def select_kind(n, k, q, gamma, centered=False):
    """Sharpest applicable bound kind, or None when no bound is known."""
    symmetric = isclose(gamma, 1.0, rel_tol=0.0, abs_tol=GAMMA_ONE_TOL)
    if _open_band(n, q):
        return None
    if q == n and (symmetric or centered):
        return BoundKind.CONE_VOLUME
    if symmetric and 0 < q < n:
        return BoundKind.EVEN_LOW_Q
    if symmetric and q > n + 1:
        return BoundKind.EVEN_HIGH_Q
    if k + 1 < q <= n:
        return BoundKind.GENERAL_LOW_Q
    if q > n + 1:
        return BoundKind.GENERAL_HIGH_Q
    return None


# ------------------------------------------------------------ verification --

@dataclass(frozen=True)
class VerificationRecord:
    """One comparison ``ratio <= bound``; ``margin = bound - ratio``.

    ``passed`` is None for rows without a known bound.
    """

    body: str
    q: float
    L: tuple
    gamma: float
    ratio: float
    bound: Optional[float]
    bound_kind: Optional[str]
    margin: Optional[float]
    passed: Optional[bool]
    method: str = "facet"
    stderr: float = 0.0
    tolerance: float = PASS_TOL
    notes: tuple = field(default=())

    @property
    def k(self):
        return len(self.L)

    def to_dict(self):
        return {
            "body": self.body, "q": self.q, "k": self.k, "L": [list(r) for r in self.L],
            "gamma": self.gamma, "ratio": self.ratio, "bound": self.bound,
            "bound_kind": self.bound_kind, "margin": self.margin, "pass": self.passed,
            "method": self.method, "stderr": self.stderr, "tolerance": self.tolerance,
            "notes": list(self.notes),
        }


def body_gamma(body):
    """Asymmetry constant; product balls and balls are symmetric."""
    if isinstance(body.shape, (ProductBall, Ball)):
        return 1.0
    return asymmetry_constant(body).gamma


def is_centered(body):
    if isinstance(body.shape, (ProductBall, Ball)):
        return True
    return bool(np.max(np.abs(centroid(body))) <= CENTERED_TOL)


def verify_body(body, q_list, L_list, quad=None, tol=PASS_TOL):
    """One :class:`VerificationRecord` per (q, L), in input order."""
    quad = quad or QuadratureSpec()
    if not q_list:
        raise ConfigError("q list must not be empty")
    gamma = body_gamma(body)
    centered = is_centered(body)
    n = body.dim
    records = []
    for q in q_list:
        phi = PhiSpec(float(q))
        for L in L_list:
            k = L.k
            if not q > k:
                raise DomainError(f"q = {q:g} must exceed dim L = {k}")
            rep = concentration_ratio(body, phi, L, quad)
            kind = select_kind(n, k, q, gamma, centered)
            notes = tuple(rep.warnings)
            if kind is None:
                bound = margin = passed = None
                notes += ("no known bound in this range",)
            else:
                bound = theorem_bound(n, k, q, gamma, kind)
                margin = bound - rep.ratio
                passed = bool(margin >= -tol)
            records.append(VerificationRecord(
                body.name, float(q), tuple(tuple(float(c) for c in row) for row in L.basis), float(gamma),
                float(rep.ratio), bound, None if kind is None else kind.value, margin, passed,
                rep.method, float(rep.stderr_ratio), tol, notes))
    return records


# ------------------------------------------------------ Anderson-type checks --

@dataclass(frozen=True)
class AndersonResult:
    branch: str
    left: float
    right: float
    margin: float
    lambda0: float
    lambda1: float


def _affine_frame(points, tol=1e-10):
    """Origin-nearest point of the affine hull and an orthonormal basis of its direction."""
    c = points.mean(axis=0)
    _, s, vt = np.linalg.svd(points - c)
    dim = int(np.sum(s > tol * max(1.0, s[0])))
    basis = vt[:dim]
    foot = c - basis.T @ (basis @ c)
    return foot, basis


def _polygon_section(points, foot, basis):
    """Counter-clockwise hull ring of planar points in the frame (foot, basis)."""
    w = (points - foot) @ basis.T
    hull = ConvexHull(w)
    return Section(2, "polytope", foot, vertices=w[hull.vertices])


def polygon_integral(points, phi):
    """``int`` of phi over the convex hull of coplanar points in R^n (n >= 2)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = points.shape[1]
    foot, basis = _affine_frame(points)
    if basis.shape[0] != 2:
        raise UnsupportedError("integration implemented for 2-dimensional polytopes only")
    if phi.q <= n - 2:
        raise DomainError("phi is not integrable over 2-dimensional sets through the origin")
    sec = _polygon_section(points, foot, basis)
    return section_integral(sec, phi, n, n - 2, basis)


def _minkowski(a, b, l0, l1):
    """Vertex sums spanning ``l0 conv(a) + l1 conv(b)``."""
    return (l0 * a[:, None, :] + l1 * b[None, :, :]).reshape(-1, a.shape[1])


def anderson_inequality_check(section, phi, lambda0, lambda1, branch="auto"):
    """Margin of the Anderson-type inequality for a 2-dimensional polytope C.

    ``section`` holds the vertices of C as rows in R^n. Branch
    ``"quasiconcave"`` (phi of degree p <= 0) checks::

        int_{l0 C + l1 (-C)} phi >= (l0 + l1)^(p + 2) int_C phi

    and branch ``"convex"`` (p >= 1) checks, with K0 = C and K1 = -C::

        int_{l0 K0 + l1 K1} phi + int_{l0 K1 + l1 K0} phi
            >= (l0 + l1)^2 |l0 - l1|^p (int_K0 phi + int_K1 phi)
    """
    C = np.atleast_2d(np.asarray(section, dtype=float))
    n = C.shape[1]
    p = phi.degree(n)
    if not (lambda0 > 0 and lambda1 > 0):
        raise DomainError("lambda0 and lambda1 must be positive")
    _, basis = _affine_frame(C)
    k = basis.shape[0]
    if k > 3:
        raise UnsupportedError("Minkowski sums limited to dimension <= 3")
    if k != 2:
        raise UnsupportedError("integration implemented for 2-dimensional polytopes only")
    if branch == "auto":
        branch = "quasiconcave" if p <= 0 else "convex"
    if branch == "quasiconcave":
        if p > 0:
            raise DomainError("quasiconcave branch needs phi of degree p <= 0")
        left = polygon_integral(_minkowski(C, -C, lambda0, lambda1), phi)
        right = (lambda0 + lambda1) ** (p + k) * polygon_integral(C, phi)
    elif branch == "convex":
        if p < 1 or not phi.is_euclidean:
            raise DomainError("convex branch needs phi = |z|^p with p >= 1")
        left = (polygon_integral(_minkowski(C, -C, lambda0, lambda1), phi)
                + polygon_integral(_minkowski(-C, C, lambda0, lambda1), phi))
        right = ((lambda0 + lambda1) ** k * abs(lambda0 - lambda1) ** p
                 * (polygon_integral(C, phi) + polygon_integral(-C, phi)))
    else:
        raise ConfigError(f"unknown branch {branch!r}")
    return AndersonResult(branch, float(left), float(right), float(left - right),
                          float(lambda0), float(lambda1))


# ------------------------------------------------------------------ sweeps --

FAMILIES = ("shifted_cube", "stretched_simplex", "random_tangent")


@dataclass(frozen=True)
class SweepRow:
    """``margin = ratio - bound`` (non-positive when the bound holds)."""

    family: str
    param: float
    q: float
    gamma: float
    ratio: float
    bound: Optional[float]
    bound_kind: Optional[str]
    margin: Optional[float]

    def to_dict(self):
        return {"family": self.family, "param": self.param, "q": self.q, "gamma": self.gamma,
                "ratio": self.ratio, "bound": self.bound, "bound_kind": self.bound_kind,
                "margin": self.margin}


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    max_margin: Optional[float] = None
    argmax: Optional[float] = None


def family_body(family, n, param, m=12):
    if family == "shifted_cube":
        return generators.shifted_cube(n, float(param))
    if family == "stretched_simplex":
        return generators.stretched_simplex(n, float(param))
    if family == "random_tangent":
        return generators.random_tangent(n, m, seed=int(param))
    raise ConfigError(f"unknown family {family!r}; expected one of {FAMILIES}")


def _sweep_row(family, param, body, q, L, quad, centered):
    if centered:
        body = generators.centered(body)
    gamma = body_gamma(body)
    rep = concentration_ratio(body, PhiSpec(q), L, quad)
    if centered:
        kind = None if _open_band(body.dim, q) or not q > L.k + 1 else BoundKind.CENTERED_COROLLARY
    else:
        kind = select_kind(body.dim, L.k, q, gamma, is_centered(body))
    bound = None if kind is None else theorem_bound(body.dim, L.k, q, gamma, kind)
    margin = None if bound is None else float(rep.ratio - bound)
    return SweepRow(family, float(param), float(q), float(gamma), float(rep.ratio), bound,
                    None if kind is None else kind.value, margin)


def tightness_sweep(family, params, q_grid, L, n=3, quad=None, m=12, centered=False,
                    optimize=None):
    """Table of (param, q, gamma, ratio, bound, margin) over a body family.

    With ``centered`` every body is first translated to its centroid and
    compared with the centered corollary bound. ``optimize=(lo, hi, q)``
    additionally maximises ``ratio - bound`` over the family parameter
    (bounded Brent search, continuous families only).
    """
    quad = quad or QuadratureSpec()
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}; expected one of {FAMILIES}")
    rows = []
    for param in params:
        body = family_body(family, n, param, m)
        for q in q_grid:
            rows.append(_sweep_row(family, param, body, float(q), L, quad, centered))
    best = arg = None
    if optimize is not None:
        if family == "random_tangent":
            raise ConfigError("parameter search needs a continuous family")
        lo, hi, q = optimize

        def neg(t):
            row = _sweep_row(family, t, family_body(family, n, t, m), float(q), L, quad, centered)
            if row.margin is None:
                raise DomainError("no bound available for the optimised q")
            return -row.margin

        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-4})
        best, arg = float(-res.fun), float(res.x)
    return SweepResult(tuple(rows), best, arg)
