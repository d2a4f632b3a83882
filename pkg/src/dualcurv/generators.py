"""Parametrised families of test bodies."""
import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull

from .exceptions import ConfigError, DualCurvError
from .geometry import BodyDescriptor, HPolytope, ProductBall, ball
from .geometry.ops import centroid, translate
from .rng import sphere_block

GENERATOR_KINDS = (
    "cube", "cross_polytope", "simplex_centered", "shifted_cube",
    "stretched_simplex", "random_tangent", "product_ball", "ball",
)


class GenerationError(DualCurvError):
    """A random body could not be produced within the resampling budget."""


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    dim: int
    t: float = 0.0
    m: int = 12
    seed: int = 0
    k: int = 1
    s: float = 1.0
    name: Optional[str] = None

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ConfigError(f"unknown generator kind {self.kind!r}")
        if self.dim < 2:
            raise ConfigError("generated bodies need dim >= 2")
        if self.kind == "shifted_cube" and not 0.0 <= self.t < 1.0:
            raise ConfigError("shifted_cube needs 0 <= t < 1")
        if self.kind == "random_tangent" and self.m < self.dim + 1:
            raise ConfigError("random_tangent needs m >= dim + 1 halfspaces")
        if self.kind == "stretched_simplex" and not self.s > 0:
            raise ConfigError("stretched_simplex needs s > 0")


def cube(n, name=None):
    a = np.vstack([np.eye(n), -np.eye(n)])
    return BodyDescriptor(name or f"cube{n}", HPolytope.from_inequalities(a, np.ones(2 * n)))


def shifted_cube(n, t, name=None):
    """``[-1+t, 1+t] x [-1, 1]^(n-1)``; its asymmetry constant is (1-t)/(1+t)."""
    a = np.vstack([np.eye(n), -np.eye(n)])
    b = np.ones(2 * n)
    b[0] += t
    b[n] -= t
    return BodyDescriptor(name or f"shifted_cube{n}_t{t:g}", HPolytope.from_inequalities(a, b))


def cross_polytope(n, name=None):
    """``sum |x_i| <= 1``."""
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    a = signs / np.sqrt(n)
    b = np.full(len(signs), 1.0 / np.sqrt(n))
    return BodyDescriptor(name or f"cross{n}", HPolytope.from_inequalities(a, b))


def regular_simplex_vertices(n):
    """Vertices of a regular simplex with circumradius 1 and centroid 0.

    The first vertex is ``e_n``; for n = 2 the vertices sit at 90, 210 and
    330 degrees.
    """
    e = np.eye(n + 1) - 1.0 / (n + 1)
    q, _ = np.linalg.qr(e.T[:, :n])
    v = e @ q
    v /= np.linalg.norm(v[0])
    # Householder reflection taking v[0] to e_n
    target = np.zeros(n)
    target[-1] = 1.0
    w = v[0] - target
    if np.linalg.norm(w) > 1e-14:
        w /= np.linalg.norm(w)
        v = v - 2.0 * np.outer(v @ w, w)
    return v


def simplex_centered(n, name=None):
    v = regular_simplex_vertices(n)
    # facet opposite vertex i has outer normal -v_i and inradius 1/n
    return BodyDescriptor(name or f"simplex{n}", HPolytope.from_inequalities(-v, np.full(n + 1, 1.0 / n)))


def stretched_simplex(n, s, name=None):
    """Centred regular simplex stretched by ``s`` along the last axis."""
    v = regular_simplex_vertices(n)
    v[:, -1] *= s
    hull = ConvexHull(v)
    eq = hull.equations
    body = BodyDescriptor(name or f"stretched_simplex{n}_s{s:g}",
                          HPolytope.from_inequalities(eq[:, :-1], -eq[:, -1]))
    return body


def random_tangent(n, m, seed=0, name=None, max_tries=100):
    """Intersection of ``m`` halfspaces tangent to the unit sphere.

    Normals are drawn uniformly from the sphere (counter-based stream keyed by
    ``seed``); draws are repeated until the intersection is bounded.
    """
    for attempt in range(max_tries):
        a = sphere_block(seed, attempt * m, m, n)
        try:
            hull = ConvexHull(a)
        except Exception:
            continue
        # bounded iff the origin is interior to conv(normals)
        if np.all(hull.equations[:, -1] < -1e-9):
            shape = HPolytope.from_inequalities(a, np.ones(m))
            return BodyDescriptor(name or f"random_tangent{n}_m{m}_s{seed}", shape)
    raise GenerationError(f"no bounded random tangent body after {max_tries} draws")


def centered(body, name=None):
    """Translate a polytope so that its centroid is the origin."""
    return translate(body, -centroid(body), name=name or f"{body.name}_centered")


def generate_body(spec):
    """Build the body described by a :class:`GeneratorSpec`."""
    n = spec.dim
    if spec.kind == "cube":
        body = cube(n)
    elif spec.kind == "cross_polytope":
        body = cross_polytope(n)
    elif spec.kind == "simplex_centered":
        body = simplex_centered(n)
    elif spec.kind == "shifted_cube":
        body = shifted_cube(n, spec.t)
    elif spec.kind == "stretched_simplex":
        body = stretched_simplex(n, spec.s)
    elif spec.kind == "random_tangent":
        body = random_tangent(n, spec.m, spec.seed)
    elif spec.kind == "product_ball":
        body = BodyDescriptor(f"product_ball{n}_k{spec.k}", ProductBall(n, spec.k))
    else:
        body = ball(n)
    if spec.name:
        body = BodyDescriptor(spec.name, body.shape)
    return body


def standard_suite():
    """Bodies used by the bound verification suite (24 bodies, n in {2, 3, 4})."""
    bodies = [cube(2), cross_polytope(2), simplex_centered(2), shifted_cube(2, 0.4), random_tangent(2, 7, 0)]
    bodies += [cube(3), cross_polytope(3), simplex_centered(3)]
    bodies += [shifted_cube(3, t) for t in (0.1, 0.3, 0.6)]
    bodies += [stretched_simplex(3, s) for s in (0.5, 2.0)]
    bodies += [random_tangent(3, 10, seed) for seed in range(5)]
    bodies += [BodyDescriptor("product_ball3_k1", ProductBall(3, 1)), ball(3)]
    bodies += [cube(4), cross_polytope(4), simplex_centered(4), shifted_cube(4, 0.3)]
    return bodies
