"""Convex body representations.

Every body contains the origin in its interior. Polytopes keep both of
their representations: the H-representation is canonical (unit normals)
and the V-representation is derived lazily and cached.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

from ..exceptions import InvariantError
from . import polytope as _poly

ORIGIN_TOL = 1e-9


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _normalize_rows(normals, offsets):
    norms = np.linalg.norm(normals, axis=1)
    if np.any(norms <= 1e-300):
        raise InvariantError("unit_normals", "facet normal of zero length")
    # idempotent: rows that are already unit length are left bit-identical
    scale = np.where(np.abs(norms - 1.0) > 1e-14, norms, 1.0)
    return normals / scale[:, None], offsets / scale


def _check_bounded(normals, offsets):
    n = normals.shape[1]
    for j in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = -sign
            res = linprog(c, A_ub=normals, b_ub=offsets, bounds=[(None, None)] * n, method="highs")
            if res.status == 3:
                raise InvariantError("bounded", f"support in direction {'+' if sign > 0 else '-'}e_{j + 1} is infinite")
            if res.status != 0:
                raise InvariantError("bounded", f"support maximisation failed ({res.message})")


@dataclass(frozen=True, eq=False)
class HPolytope:
    """``{x : <a_i, x> <= b_i}`` with unit outward normals ``a_i`` and ``b_i > 0``."""

    normals: np.ndarray
    offsets: np.ndarray
    kind = "hpolytope"

    @classmethod
    def from_inequalities(cls, normals, offsets, validate=True):
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        offsets = np.asarray(offsets, dtype=float).ravel()
        if normals.shape[0] != offsets.size:
            raise InvariantError("shape", f"{normals.shape[0]} normals but {offsets.size} offsets")
        normals, offsets = _normalize_rows(normals, offsets)
        poly = cls(_frozen(normals), _frozen(offsets))
        if validate:
            poly.validate()
        return poly

    @property
    def dim(self):
        return self.normals.shape[1]

    def validate(self):
        a, b = self.normals, self.offsets
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise InvariantError("finite", "non-finite entries")
        if np.any(np.abs(np.linalg.norm(a, axis=1) - 1.0) > 1e-12):
            raise InvariantError("unit_normals", "rows are not unit length")
        if np.any(b <= ORIGIN_TOL):
            i = int(np.argmin(b))
            raise InvariantError("origin_interior", f"offset b_{i} = {b[i]:g} <= {ORIGIN_TOL:g}")
        gram = a @ a.T
        m = len(b)
        for i in range(m):
            for j in range(i + 1, m):
                if gram[i, j] > 1.0 - 1e-12 and abs(b[i] - b[j]) < 1e-12:
                    raise InvariantError("no_duplicate_facets", f"facets {i} and {j} coincide")
        if self.dim == 1:
            if not (np.any(a[:, 0] > 0) and np.any(a[:, 0] < 0)):
                raise InvariantError("bounded", "interval is unbounded")
        else:
            _check_bounded(a, b)

    @cached_property
    def vertices(self):
        return _frozen(_poly.h_to_v(self.normals, self.offsets))

    @cached_property
    def facets(self):
        return _poly.enumerate_facets(self.normals, self.offsets, self.vertices)

    def contains(self, points, tol=0.0):
        points = np.atleast_2d(points)
        return np.all(points @ self.normals.T <= self.offsets + tol, axis=1)

    def hrep(self):
        return self


@dataclass(frozen=True, eq=False)
class VPolytope:
    """Convex hull of a finite vertex list with the origin strictly inside."""

    vertices: np.ndarray
    kind = "vpolytope"

    @classmethod
    def from_points(cls, vertices, validate=True):
        poly = cls(_frozen(np.atleast_2d(np.asarray(vertices, dtype=float))))
        if validate:
            poly.validate()
        return poly

    @property
    def dim(self):
        return self.vertices.shape[1]

    def validate(self):
        v = self.vertices
        if not np.all(np.isfinite(v)):
            raise InvariantError("finite", "non-finite vertex coordinates")
        n = self.dim
        if len(v) < n + 1 or np.linalg.matrix_rank(v[1:] - v[0]) < n:
            raise InvariantError("affinely_independent", f"need {n + 1} affinely independent vertices")
        _, b = _poly.v_to_h(v)
        if np.any(b <= ORIGIN_TOL):
            raise InvariantError("origin_interior", "origin is not strictly inside the convex hull")

    @cached_property
    def _h(self):
        a, b = _poly.v_to_h(self.vertices)
        return HPolytope.from_inequalities(a, b, validate=False)

    def hrep(self):
        return self._h

    @property
    def normals(self):
        return self._h.normals

    @property
    def offsets(self):
        return self._h.offsets

    @property
    def facets(self):
        return self._h.facets

    def contains(self, points, tol=0.0):
        return self._h.contains(points, tol)


@dataclass(frozen=True)
class ProductBall:
    """``B_k x B_{n-k}``: membership iff |x[:k]| <= 1 and |x[k:]| <= 1."""

    n: int
    k: int
    kind = "product_ball"

    def __post_init__(self):
        if not 1 <= self.k <= self.n - 1:
            raise InvariantError("split_index", f"need 1 <= k <= n-1, got n={self.n}, k={self.k}")

    @property
    def dim(self):
        return self.n

    def validate(self):
        pass

    def contains(self, points, tol=0.0):
        points = np.atleast_2d(points)
        a = np.linalg.norm(points[:, : self.k], axis=1)
        b = np.linalg.norm(points[:, self.k :], axis=1)
        return (a <= 1.0 + tol) & (b <= 1.0 + tol)


@dataclass(frozen=True)
class Ball:
    """Euclidean ball of the given radius centred at the origin."""

    n: int
    radius: float = 1.0
    kind = "ball"

    def __post_init__(self):
        if self.n < 1 or not self.radius > 0:
            raise InvariantError("ball", f"need n >= 1 and radius > 0, got n={self.n}, r={self.radius}")

    @property
    def dim(self):
        return self.n

    def validate(self):
        pass

    def contains(self, points, tol=0.0):
        points = np.atleast_2d(points)
        return np.linalg.norm(points, axis=1) <= self.radius + tol


POLYTOPE_KINDS = ("hpolytope", "vpolytope")


@dataclass(frozen=True)
class BodyDescriptor:
    """A named convex body: ``shape`` is one of the representation classes above."""

    name: str
    shape: object = field(repr=False)

    @property
    def kind(self):
        return self.shape.kind

    @property
    def dim(self):
        return self.shape.dim

    @property
    def is_polytope(self):
        return self.kind in POLYTOPE_KINDS

    def hrep(self):
        """Canonical H-representation (polytopes only)."""
        return self.shape.hrep()

    def contains(self, points, tol=0.0):
        return self.shape.contains(points, tol)

    def __repr__(self):
        return f"BodyDescriptor(name={self.name!r}, kind={self.kind!r}, dim={self.dim})"


def hpolytope(name, normals, offsets):
    return BodyDescriptor(name, HPolytope.from_inequalities(normals, offsets))


def vpolytope(name, vertices):
    return BodyDescriptor(name, VPolytope.from_points(vertices))


def product_ball(n, k, name=None):
    return BodyDescriptor(name or f"product_ball{n}_k{k}", ProductBall(n, k))


def ball(n, radius=1.0, name=None):
    return BodyDescriptor(name or f"ball{n}", Ball(n, float(radius)))
