"""Input checks shared by the estimator layer."""
import numpy as np
from sklearn.utils import check_array

from .exceptions import ConfigError, DomainError
from .geometry import BodyDescriptor, Subspace
from .measures import PhiSpec


def check_body(body):
    if not isinstance(body, BodyDescriptor):
        raise ConfigError(f"expected a BodyDescriptor, got {type(body).__name__}")
    return body


def _array(X):
    try:
        return check_array(X, dtype=float)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def check_subspace(L, n):
    """Accept a Subspace, a coordinate index list, or basis rows."""
    if isinstance(L, Subspace):
        sub = L
    else:
        arr = np.asarray(L)
        if arr.ndim == 1 and arr.dtype.kind in "iu":
            sub = Subspace.coordinate(n, [int(i) for i in arr])
        else:
            sub = Subspace.from_basis(_array(np.atleast_2d(arr)), orthonormalize=True)
    if sub.n != n:
        raise DomainError(f"subspace lives in R^{sub.n}, expected R^{n}")
    return sub


def check_points(X, k):
    """``(N, k)`` float array of finite points in L-coordinates."""
    X = _array(np.asarray(X, dtype=float).reshape(-1, k) if np.ndim(X) < 2 else X)
    if X.shape[1] != k:
        raise DomainError(f"points need {k} coordinates, got {X.shape[1]}")
    return X


def check_phi(q, sphere_fn=None):
    if isinstance(q, PhiSpec):
        return q
    if not np.isfinite(q):
        raise ConfigError(f"q must be finite, got {q}")
    if sphere_fn is None:
        return PhiSpec(float(q))
    return PhiSpec(float(q), sphere_fn, name=getattr(sphere_fn, "__name__", "custom"))
