"""Proper linear subspaces given by orthonormal bases."""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..exceptions import InvariantError


@dataclass(frozen=True, eq=False)
class Subspace:
    """Row-orthonormal ``k x n`` basis of a proper subspace L of R^n."""

    basis: np.ndarray

    def __post_init__(self):
        b = self.basis
        if b.ndim != 2:
            raise InvariantError("basis_shape", "basis must be a k x n matrix")
        k, n = b.shape
        if not 1 <= k <= n - 1:
            raise InvariantError("proper", f"need 1 <= dim L <= n-1, got k={k}, n={n}")
        if np.max(np.abs(b @ b.T - np.eye(k))) > 1e-12:
            raise InvariantError("orthonormal", "basis rows are not orthonormal within 1e-12")

    @classmethod
    def from_basis(cls, rows, orthonormalize=False):
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        if orthonormalize:
            q, r = np.linalg.qr(rows.T)
            if np.min(np.abs(np.diag(r))) < 1e-12:
                raise InvariantError("proper", "basis rows are linearly dependent")
            rows = q.T
        rows = rows.copy()
        rows.setflags(write=False)
        return cls(rows)

    @classmethod
    def coordinate(cls, n, indices):
        """``span(e_i : i in indices)`` with zero-based indices."""
        indices = sorted(set(int(i) for i in indices))
        if any(i < 0 or i >= n for i in indices):
            raise InvariantError("proper", f"coordinate index out of range for n={n}: {indices}")
        rows = np.eye(n)[indices]
        rows.setflags(write=False)
        return cls(rows)

    @property
    def k(self):
        return self.basis.shape[0]

    @property
    def n(self):
        return self.basis.shape[1]

    @cached_property
    def coordinate_indices(self):
        """Indices if this is a coordinate subspace, else ``None``."""
        b = self.basis
        if np.all((b == 0.0) | (b == 1.0)) and np.all(b.sum(axis=1) == 1.0):
            idx = [int(np.argmax(r)) for r in b]
            if idx == sorted(idx):
                return tuple(idx)
        return None

    @cached_property
    def complement(self):
        """Row-orthonormal basis of the orthogonal complement."""
        idx = self.coordinate_indices
        if idx is not None:
            rest = [i for i in range(self.n) if i not in idx]
            c = np.eye(self.n)[rest]
        else:
            u, s, vt = np.linalg.svd(self.basis)
            c = vt[self.k :]
        c.setflags(write=False)
        return c

    def project(self, x):
        """Coordinates of the orthogonal projection onto L (in the basis of L)."""
        return np.asarray(x, dtype=float) @ self.basis.T

    def embed(self, y):
        """Map L-coordinates back into R^n."""
        return np.asarray(y, dtype=float) @ self.basis

    def distance(self, v):
        """Euclidean distance of the rows of ``v`` from L."""
        v = np.atleast_2d(v)
        return np.linalg.norm(v - (v @ self.basis.T) @ self.basis, axis=1)

    def contains(self, v, tol=1e-9):
        return self.distance(v) <= tol

    def __repr__(self):
        idx = self.coordinate_indices
        if idx is not None:
            return f"Subspace(span e{list(i + 1 for i in idx)}, n={self.n})"
        return f"Subspace(k={self.k}, n={self.n})"
