"""Estimator-style wrappers around the functional core.

``fit`` takes a body, ``transform`` evaluates on subspaces or points::

    est = ConcentrationRatio(q=2.5).fit(cube(3))
    est.transform([[0], [0, 1]])        # ratios for span(e1), span(e1, e2)
"""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .measures import QuadratureSpec, concentration_ratio, total_measure
from .slicing import FDSpec, _radial_fd, g_values
from .validation import check_body, check_phi, check_points, check_subspace


class ConcentrationRatio(BaseEstimator):
    """Dual curvature measure of a fitted body and its subspace concentration."""

    def __init__(self, q=2.0, method="auto", samples=200_000, seed=0, order=8):
        self.q = q
        self.method = method
        self.samples = samples
        self.seed = seed
        self.order = order

    def _quad(self):
        return QuadratureSpec(self.method, self.samples, self.seed, self.order)

    def fit(self, body, y=None):
        self.body_ = check_body(body)
        self.phi_ = check_phi(self.q)
        self.total_ = total_measure(self.body_, self.phi_, self._quad())
        return self

    def transform(self, subspaces):
        """Concentration ratio for each subspace (index list, basis rows or Subspace)."""
        check_is_fitted(self, "total_")
        n = self.body_.dim
        reports = [concentration_ratio(self.body_, self.phi_, check_subspace(L, n), self._quad())
                   for L in subspaces]
        return np.array([r.ratio for r in reports])

    def fit_transform(self, body, subspaces):
        return self.fit(body).transform(subspaces)


class SlicingFunction(BaseEstimator):
    """``g(x)`` and ``<grad g(x), x>`` for a fitted body and a fixed subspace."""

    def __init__(self, L=(0,), q=2.5, rel_step=1e-4, order=8):
        self.L = L
        self.q = q
        self.rel_step = rel_step
        self.order = order

    def fit(self, body, y=None):
        self.body_ = check_body(body)
        self.subspace_ = check_subspace(self.L, self.body_.dim)
        self.phi_ = check_phi(self.q)
        self.fd_ = FDSpec(self.rel_step)
        return self

    def transform(self, X):
        """g at each row of X (L-coordinates); NaN outside relint(K|L)."""
        check_is_fitted(self, "subspace_")
        X = check_points(X, self.subspace_.k)
        return g_values(self.body_, self.subspace_, self.phi_, X, QuadratureSpec(order=self.order))

    def gradient_dot(self, X):
        check_is_fitted(self, "subspace_")
        X = check_points(X, self.subspace_.k)
        _, grad, _ = _radial_fd(self.body_, self.subspace_, self.phi_, X, self.fd_,
                                QuadratureSpec(order=self.order))
        return grad
