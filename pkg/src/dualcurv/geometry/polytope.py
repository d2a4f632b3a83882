"""Polytope conversion (H <-> V), facet enumeration and simplicial decompositions.

Vertex and facet enumeration are delegated to Qhull through
:mod:`scipy.spatial`; everything built on top of it (facet triangulations,
cone decompositions) is done here.
"""
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.spatial import QhullError

from ..exceptions import InvariantError, UnsupportedError
from ..quadrature import simplex_volume

MAX_DIM = 4
MAX_ELEMENTS = 64


def _check_size(n, count, what):
    if n > MAX_DIM:
        raise UnsupportedError(f"polytope conversion limited to n <= {MAX_DIM}, got n = {n}")
    if count > MAX_ELEMENTS:
        raise UnsupportedError(f"polytope conversion limited to {MAX_ELEMENTS} {what}, got {count}")


def unique_rows(points, tol=1e-9):
    """Greedy de-duplication of nearly identical rows, keeping first occurrences."""
    points = np.asarray(points, dtype=float)
    keep = []
    for i, p in enumerate(points):
        if not any(np.max(np.abs(points[j] - p)) <= tol for j in keep):
            keep.append(i)
    return points[keep]


def h_to_v(normals, offsets):
    """Vertices of ``{x : normals @ x <= offsets}``; the origin must be interior."""
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    m, n = normals.shape
    _check_size(n, m, "facets")
    if n == 1:
        a = normals[:, 0]
        if not (np.any(a > 0) and np.any(a < 0)):
            raise InvariantError("bounded", "interval is unbounded")
        hi = np.min(offsets[a > 0] / a[a > 0])
        lo = np.max(offsets[a < 0] / a[a < 0])
        return np.array([[lo], [hi]])
    try:
        hs = HalfspaceIntersection(np.column_stack([normals, -offsets]), np.zeros(n))
    except QhullError as exc:
        raise InvariantError("bounded", f"halfspace intersection failed: {exc}") from exc
    pts = hs.intersections
    if not np.all(np.isfinite(pts)):
        raise InvariantError("bounded", "polytope is unbounded")
    scale = max(1.0, float(np.max(np.abs(pts))))
    return unique_rows(pts, 1e-9 * scale)


def v_to_h(vertices):
    """Facet normals (unit) and offsets of ``conv(vertices)``.

    Qhull triangulates non-simplicial facets; coplanar pieces are merged.
    """
    vertices = np.asarray(vertices, dtype=float)
    count, n = vertices.shape
    _check_size(n, count, "vertices")
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([vertices.max(), -vertices.min()])
    try:
        hull = ConvexHull(vertices)
    except QhullError as exc:
        raise InvariantError("affinely_independent", f"vertices are degenerate: {exc}") from exc
    eq = hull.equations
    normals = eq[:, :-1] / np.linalg.norm(eq[:, :-1], axis=1)[:, None]
    offsets = -eq[:, -1] / np.linalg.norm(eq[:, :-1], axis=1)
    rows = unique_rows(np.column_stack([normals, offsets]), 1e-9)
    return rows[:, :-1], rows[:, -1]


def hull_vertices(points):
    """Extreme points of a point cloud (k <= 3)."""
    points = np.asarray(points, dtype=float)
    if points.shape[1] == 1:
        return np.array([[points.min()], [points.max()]])
    hull = ConvexHull(points)
    return points[hull.vertices]


def _plane_basis(normal):
    """Orthonormal basis (rows) of the hyperplane orthogonal to ``normal``."""
    n = normal.size
    q, _ = np.linalg.qr(np.column_stack([normal, np.eye(n)]))
    return q[:, 1:n].T


@dataclass(frozen=True)
class Facet:
    """One facet: its outer normal, offset h_F and a simplicial decomposition."""

    index: int
    normal: np.ndarray
    offset: float
    vertices: np.ndarray
    simplices: tuple  # each an (n, n) array of points in R^n

    @property
    def volume(self):
        return float(sum(simplex_volume(s) for s in self.simplices))


def _triangulate_facet(points, normal):
    """Split an (n-1)-dimensional convex polytope in R^n into (n-1)-simplices."""
    n = normal.size
    if n == 1:
        return [points[:1]]
    center = points.mean(axis=0)
    if n == 2:
        if len(points) < 2:
            return []
        basis = _plane_basis(normal)
        t = (points - center) @ basis[0]
        order = np.argsort(t)
        return [np.array([points[order[0]], points[order[-1]]])]
    basis = _plane_basis(normal)
    local = (points - center) @ basis.T
    if n == 3:
        if len(points) < 3:
            return []
        ang = np.arctan2(local[:, 1], local[:, 0])
        ring = points[np.argsort(ang)]
        return [np.array([ring[0], ring[i], ring[i + 1]]) for i in range(1, len(ring) - 1)]
    try:
        hull = ConvexHull(local)
    except QhullError:
        return []
    out = []
    for tri in hull.simplices:
        s = np.vstack([center, points[tri]])
        if simplex_volume(s) > 0.0:
            out.append(s)
    return out


def enumerate_facets(normals, offsets, vertices, tol=1e-9):
    """All facets of ``{normals @ x <= offsets}`` with their triangulations.

    Redundant inequalities (touching the polytope in a lower-dimensional
    face, or not at all) produce facets with an empty decomposition.
    """
    normals = np.asarray(normals, dtype=float)
    vertices = np.asarray(vertices, dtype=float)
    scale = max(1.0, float(np.max(np.abs(vertices))))
    out = []
    for i, (a, b) in enumerate(zip(normals, offsets)):
        on = np.abs(vertices @ a - b) <= tol * scale
        pts = vertices[on]
        simplices = tuple(_triangulate_facet(pts, a)) if len(pts) >= a.size else ()
        out.append(Facet(i, a, float(b), pts, simplices))
    return out


def cone_simplices(facets, apex):
    """Fan decomposition of the polytope into n-simplices with common ``apex``."""
    out = []
    for f in facets:
        for s in f.simplices:
            out.append(np.vstack([apex, s]))
    return out


def delaunay_volume(vertices):
    """Volume from an independent Delaunay triangulation of the vertex set."""
    from scipy.spatial import Delaunay

    vertices = np.asarray(vertices, dtype=float)
    if vertices.shape[1] == 1:
        return float(vertices.max() - vertices.min())
    tri = Delaunay(vertices)
    return float(sum(simplex_volume(vertices[s]) for s in tri.simplices))
