"""Geometric primitives on :class:`BodyDescriptor` instances.

The ``*_many`` variants are vectorised over rows of a direction matrix and
are what the quadrature code calls; the scalar functions validate their
input and are the public per-direction API.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

from ..exceptions import DomainError, InvariantError, UnsupportedError
from ..quadrature import ball_volume, simplex_volume
from . import polytope as _poly
from .bodies import Ball, BodyDescriptor, HPolytope, ProductBall

UNIT_TOL = 1e-12
TIE_TOL = 1e-10


def _unit(u):
    u = np.asarray(u, dtype=float).ravel()
    if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
        raise DomainError(f"direction must be a unit vector (|u| = {np.linalg.norm(u)!r})")
    return u


def _check_dim(body, u):
    if u.shape[-1] != body.dim:
        raise DomainError(f"direction has dimension {u.shape[-1]}, body has dimension {body.dim}")


def _ratio_matrix(poly, U):
    d = U @ poly.normals.T
    with np.errstate(divide="ignore"):
        r = np.where(d > 1e-300, poly.offsets / np.where(d > 1e-300, d, 1.0), np.inf)
    return r


# ---------------------------------------------------------------- radial ----

def radial_many(body, U):
    """Radial function on the rows of ``U`` (assumed unit length)."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    shape = body.shape
    if body.is_polytope:
        r = _ratio_matrix(body.hrep(), U).min(axis=1)
        if not np.all(np.isfinite(r)):
            raise InvariantError("bounded", "radial function is infinite: body is unbounded")
        return r
    if isinstance(shape, ProductBall):
        a = np.linalg.norm(U[:, : shape.k], axis=1)
        b = np.linalg.norm(U[:, shape.k :], axis=1)
        return 1.0 / np.maximum(a, b)
    if isinstance(shape, Ball):
        return np.full(U.shape[0], shape.radius)
    raise UnsupportedError(f"radial function not available for kind {body.kind!r}")


def radial(body, u):
    """``max{r > 0 : r u in K}`` for a unit vector ``u``."""
    u = _unit(u)
    _check_dim(body, u)
    return float(radial_many(body, u[None, :])[0])


def radial_extended(body, x):
    """Degree -1 homogeneous extension ``rho(x) = rho(x/|x|)/|x|``."""
    x = np.asarray(x, dtype=float).ravel()
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise DomainError("radial function is undefined at the origin")
    return float(radial_many(body, (x / norm)[None, :])[0] / norm)


# --------------------------------------------------------------- support ----

def support_many(body, U):
    U = np.atleast_2d(np.asarray(U, dtype=float))
    shape = body.shape
    if body.is_polytope:
        return np.max(U @ body.hrep().vertices.T, axis=1)
    if isinstance(shape, ProductBall):
        return np.linalg.norm(U[:, : shape.k], axis=1) + np.linalg.norm(U[:, shape.k :], axis=1)
    if isinstance(shape, Ball):
        return shape.radius * np.linalg.norm(U, axis=1)
    raise UnsupportedError(f"support function not available for kind {body.kind!r}")


def support(body, u):
    """``h_K(u) = max_{x in K} <u, x>`` for any vector ``u``."""
    u = np.asarray(u, dtype=float).ravel()
    _check_dim(body, u)
    return float(support_many(body, u[None, :])[0])


# ----------------------------------------------------------- Gauss map ------

def radial_gauss_many(body, U):
    """Outer unit normals at ``rho(u) u``.

    Returns ``(normals, unique, index)``. For polytopes ``index`` is the
    facet attaining the radial minimum (lowest index on ties) and
    ``unique`` is false when a second facet is within ``TIE_TOL``
    relative of the minimum.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    shape = body.shape
    if body.is_polytope:
        poly = body.hrep()
        r = _ratio_matrix(poly, U)
        idx = np.argmin(r, axis=1)
        if r.shape[1] > 1:
            two = np.partition(r, 1, axis=1)[:, :2]
            unique = (two[:, 1] - two[:, 0]) > TIE_TOL * two[:, 0]
        else:
            unique = np.ones(len(U), dtype=bool)
        return poly.normals[idx], unique, idx
    if isinstance(shape, ProductBall):
        k = shape.k
        a = np.linalg.norm(U[:, :k], axis=1)
        b = np.linalg.norm(U[:, k:], axis=1)
        first = a >= b
        nu = np.zeros_like(U)
        nu[first, :k] = U[first, :k] / a[first, None]
        nu[~first, k:] = U[~first, k:] / b[~first, None]
        unique = np.abs(a - b) > TIE_TOL * np.maximum(a, b)
        return nu, unique, np.where(first, 0, 1)
    if isinstance(shape, Ball):
        return U.copy(), np.ones(len(U), dtype=bool), np.zeros(len(U), dtype=int)
    raise UnsupportedError(f"radial Gauss map not available for kind {body.kind!r}")


def radial_gauss(body, u):
    """``(normal, unique)`` at the boundary point in direction ``u``."""
    u = _unit(u)
    _check_dim(body, u)
    nu, unique, _ = radial_gauss_many(body, u[None, :])
    return nu[0], bool(unique[0])


# ------------------------------------------------------------- asymmetry ----

@dataclass(frozen=True)
class AsymmetryResult:
    """Largest ``gamma`` with ``gamma (-K) subset K`` and its certificates."""

    gamma: float
    certificate_facet: Optional[int]
    bisection_gamma: float


def _contains_reflection(body, gamma, tol=1e-12):
    if body.is_polytope:
        v = body.hrep().vertices
        return bool(np.all(body.contains(-gamma * v, tol)))
    return True


def containment_bisection(body, tol=1e-7):
    """Largest ``gamma`` in [0, 1] with ``gamma (-K) subset K`` by membership bisection."""
    if _contains_reflection(body, 1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _contains_reflection(body, mid):
            lo = mid
        else:
            hi = mid
    return lo


def asymmetry_constant(body):
    """``gamma = min_i b_i / h_K(-a_i)`` for polytopes, 1 for the balls.

    The closed form is cross-checked against :func:`containment_bisection`.
    """
    if not body.is_polytope:
        return AsymmetryResult(1.0, None, 1.0)
    poly = body.hrep()
    h_neg = np.max(-(poly.vertices @ poly.normals.T), axis=0)
    assert np.all(h_neg > 0), "h_K(-a_i) must be positive for 0 in int K"
    ratios = poly.offsets / h_neg
    i = int(np.argmin(ratios))
    gamma = float(ratios[i])
    if gamma >= 1.0 - 1e-12:
        gamma = 1.0
    check = containment_bisection(body)
    if abs(check - gamma) > 1e-6:
        raise InvariantError("asymmetry", f"formula gamma={gamma!r} disagrees with bisection {check!r}")
    return AsymmetryResult(gamma, i, check)


# ----------------------------------------------------- volume / centroid ----

def cone_decomposition(body):
    """Simplices of the fan from the origin over the triangulated facets."""
    if not body.is_polytope:
        raise UnsupportedError("cone decomposition requires a polytope")
    poly = body.hrep()
    return _poly.cone_simplices(poly.facets, np.zeros(body.dim))


def volume(body):
    shape = body.shape
    if body.is_polytope:
        return float(sum(simplex_volume(s) for s in cone_decomposition(body)))
    if isinstance(shape, ProductBall):
        return ball_volume(shape.k) * ball_volume(shape.n - shape.k)
    if isinstance(shape, Ball):
        return ball_volume(shape.n) * shape.radius**shape.n
    raise UnsupportedError(f"volume not available for kind {body.kind!r}")


def centroid(body):
    """Centroid via volume-weighted simplex centroids of the cone decomposition."""
    if not body.is_polytope:
        return np.zeros(body.dim)
    total = 0.0
    acc = np.zeros(body.dim)
    for s in cone_decomposition(body):
        v = simplex_volume(s)
        total += v
        acc += v * s.mean(axis=0)
    return acc / total


def translate(body, shift, name=None):
    """``K + shift`` as a new H-polytope (the origin must stay interior)."""
    if not body.is_polytope:
        raise UnsupportedError("translation implemented for polytopes only")
    poly = body.hrep()
    shift = np.asarray(shift, dtype=float)
    shape = HPolytope.from_inequalities(poly.normals, poly.offsets + poly.normals @ shift)
    return BodyDescriptor(name or body.name, shape)


def scale(body, alpha, name=None):
    """``alpha K`` for ``alpha > 0``."""
    if alpha <= 0:
        raise DomainError("scale factor must be positive")
    if body.is_polytope:
        poly = body.hrep()
        return BodyDescriptor(name or body.name, HPolytope.from_inequalities(poly.normals, alpha * poly.offsets))
    if isinstance(body.shape, Ball):
        return BodyDescriptor(name or body.name, Ball(body.dim, body.shape.radius * alpha))
    raise UnsupportedError(f"scaling not available for kind {body.kind!r}")


# ------------------------------------------------------------ projection ----

def _check_pairing(body, L):
    if L.n != body.dim:
        raise DomainError(f"subspace lives in R^{L.n}, body in R^{body.dim}")
    if isinstance(body.shape, ProductBall):
        if L.coordinate_indices != tuple(range(body.shape.k)):
            raise UnsupportedError("product ball supports only L = span(e_1, ..., e_k)")


def project_body(body, L):
    """``K|L`` expressed in the coordinates of the basis of L."""
    _check_pairing(body, L)
    k = L.k
    if body.is_polytope:
        if k > 3:
            raise UnsupportedError("projection hull limited to dim L <= 3")
        pts = body.hrep().vertices @ L.basis.T
        verts = _poly.hull_vertices(pts)
        a, b = _poly.v_to_h(verts)
        shape = HPolytope.from_inequalities(a, b, validate=False)
        shape.__dict__["vertices"] = _frozen_copy(verts)
        return BodyDescriptor(f"{body.name}|L", shape)
    return BodyDescriptor(f"{body.name}|L", Ball(k, 1.0 if isinstance(body.shape, ProductBall) else body.shape.radius))


def _frozen_copy(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# ----------------------------------------------------------------- slices ---

@dataclass(frozen=True, eq=False)
class Section:
    """``K_x - x`` in coordinates of the basis of the orthogonal complement.

    ``kind`` is ``"polytope"`` (with ``vertices``; for d = 2 a
    counter-clockwise ring, for d = 3 also outward ``triangles``) or
    ``"ball"`` centred at the foot point with ``radius``.
    """

    dim: int
    kind: str
    foot: np.ndarray
    vertices: Optional[np.ndarray] = None
    triangles: Optional[np.ndarray] = None
    radius: float = 0.0

    def measure(self):
        """(n-k)-dimensional volume of the section."""
        if self.kind == "ball":
            return ball_volume(self.dim) * self.radius**self.dim
        v = self.vertices
        if self.dim == 1:
            return float(v[1, 0] - v[0, 0])
        if self.dim == 2:
            x, y = v[:, 0], v[:, 1]
            return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        return float(sum(abs(np.linalg.det(v[t])) / 6.0 for t in self.triangles))

    def contains(self, w, tol=0.0):
        w = np.atleast_2d(w)
        if self.kind == "ball":
            return np.linalg.norm(w, axis=1) <= self.radius + tol
        a, b = _poly.v_to_h(self.vertices)
        return np.all(w @ a.T <= b + tol, axis=1)


def _clip_polygon(ring, a, b):
    out = []
    m = len(ring)
    for i in range(m):
        p, q = ring[i], ring[(i + 1) % m]
        fp, fq = p @ a - b, q @ a - b
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = fp / (fp - fq)
            out.append(p + t * (q - p))
    return out


def _polygon_from_halfplanes(a, b, box):
    ring = [np.array(p, dtype=float) for p in ((-box, -box), (box, -box), (box, box), (-box, box))]
    for ai, bi in zip(a, b):
        ring = _clip_polygon(ring, ai, bi)
        if len(ring) < 3:
            return None
    ring = np.array(ring)
    keep = [0]
    for i in range(1, len(ring)):
        if np.max(np.abs(ring[i] - ring[keep[-1]])) > 1e-13 * box:
            keep.append(i)
    ring = ring[keep]
    if len(ring) > 1 and np.max(np.abs(ring[-1] - ring[0])) <= 1e-13 * box:
        ring = ring[:-1]
    return ring if len(ring) >= 3 else None


def _section_halfspaces(poly, L, x_full, tol):
    a = poly.normals @ L.complement.T
    b = poly.offsets - poly.normals @ x_full
    small = np.linalg.norm(a, axis=1) <= 1e-12
    # facets with normal in L bound K|L itself: x must be strictly inside
    if np.any(b[small] <= tol):
        raise DomainError("point outside the relative interior of K|L")
    a, b = a[~small], b[~small]
    norms = np.linalg.norm(a, axis=1)
    return a / norms[:, None], b / norms


def slice_body(body, L, x, tol=1e-9):
    """Section of K through ``x`` (L-coordinates) parallel to the complement of L.

    Raises :class:`DomainError` unless ``x`` lies in the relative interior
    of ``K|L`` (full-dimensional section with inradius above ``tol``).
    """
    _check_pairing(body, L)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (L.k,):
        raise DomainError(f"x must have {L.k} coordinates")
    x_full = L.embed(x)
    d = body.dim - L.k
    shape = body.shape
    if isinstance(shape, ProductBall):
        if np.linalg.norm(x) >= 1.0 - tol:
            raise DomainError("point outside the relative interior of K|L")
        return Section(d, "ball", x_full, radius=1.0)
    if isinstance(shape, Ball):
        r2 = shape.radius**2 - x @ x
        if r2 <= tol**2 or np.sqrt(r2) <= tol:
            raise DomainError("point outside the relative interior of K|L")
        return Section(d, "ball", x_full, radius=float(np.sqrt(r2)))
    poly = body.hrep()
    a, b = _section_halfspaces(poly, L, x_full, tol)
    if d == 1:
        col = a[:, 0]
        hi = np.min(b[col > 0] / col[col > 0])
        lo = np.max(b[col < 0] / col[col < 0])
        if hi - lo <= tol:
            raise DomainError("point outside the relative interior of K|L")
        return Section(1, "polytope", x_full, vertices=np.array([[lo], [hi]]))
    box = 4.0 * (1.0 + float(np.max(np.abs(poly.vertices))))
    if d == 2:
        ring = _polygon_from_halfplanes(a, b, box)
        if ring is None:
            raise DomainError("point outside the relative interior of K|L")
        sec = Section(2, "polytope", x_full, vertices=ring)
        perim = float(np.sum(np.linalg.norm(ring - np.roll(ring, -1, axis=0), axis=1)))
        if sec.measure() <= tol * perim:
            raise DomainError("point outside the relative interior of K|L")
        return sec
    if d == 3:
        m = len(b)
        c = np.zeros(d + 1)
        c[-1] = -1.0
        res = linprog(c, A_ub=np.column_stack([a, np.ones(m)]), b_ub=b,
                      bounds=[(None, None)] * d + [(0, None)], method="highs")
        if res.status != 0 or res.x[-1] <= tol:
            raise DomainError("point outside the relative interior of K|L")
        center = res.x[:d]
        hs = HalfspaceIntersection(np.column_stack([a, -b]), center)
        verts = _poly.unique_rows(hs.intersections, 1e-12 * box)
        hull = ConvexHull(verts)
        tris = []
        for simplex, eq in zip(hull.simplices, hull.equations):
            p = verts[simplex]
            nrm = np.cross(p[1] - p[0], p[2] - p[0])
            tris.append(simplex if nrm @ eq[:3] > 0 else simplex[::-1])
        return Section(3, "polytope", x_full, vertices=verts, triangles=np.array(tris))
    raise UnsupportedError(f"sections of dimension {d} are not supported")


def section_intervals(body, L, X, tol=1e-9):
    """Vectorised 1-dimensional sections: ``(lo, hi, valid)`` for rows of ``X``."""
    poly = body.hrep()
    X = np.atleast_2d(X)
    xf = X @ L.basis
    a = (poly.normals @ L.complement.T)[:, 0]
    b = poly.offsets[None, :] - xf @ poly.normals.T
    small = np.abs(a) <= 1e-12
    ok = np.all(b[:, small] > tol, axis=1)
    pos, neg = a > 1e-12, a < -1e-12
    hi = np.min(b[:, pos] / a[pos], axis=1)
    lo = np.max(b[:, neg] / a[neg], axis=1)
    valid = ok & (hi - lo > tol)
    return lo, hi, valid
