"""The slicing function g(x) = int_{K cap (x + L^perp)} phi, its radial
derivative <grad g(x), x>, and the divergence identity linking them to the
subspace concentration ratio.

Integration over a section uses cones with apex at the foot point ``x``
(the point of ``x + L^perp`` closest to the origin). Along each ray the
one-dimensional integral ``int_0^R phi(x + r u) r^(d-1) dr`` is done with the
substitution ``r = |x| sinh(s)``, which resolves the peak of
``|z|^(q-n)`` near the foot point; at ``x = 0`` it is integrated exactly.
"""
from dataclasses import dataclass, field
from math import ceil, exp, pi

import numpy as np

from ._parallel import pmap
from .exceptions import ConfigError, DomainError, OpenRangeError, UnsupportedError
from .geometry import project_body, slice_body
from .geometry.bodies import Ball, ProductBall
from .geometry.ops import section_intervals
from .measures import QuadratureSpec, concentration_ratio
from .quadrature import gauss_legendre, simplex_rule, sphere_rule, unit_panels
from .rng import uniform_block

DEFAULT_LEVELS = (4, 8, 16)
REFERENCE_GRID = 64
ADAPT_RTOL = 1e-11
MIN_POINTS = 100


@dataclass(frozen=True)
class FDSpec:
    """Finite-difference settings for ``t -> g((1 + t) x)`` at ``t = 0``.

    ``scheme="forward-at-boundary"`` switches to a one-sided quotient when
    the central stencil leaves the relative interior of ``K|L``;
    ``scheme="central"`` refuses such points.
    """

    rel_step: float = 1e-4
    scheme: str = "forward-at-boundary"

    def __post_init__(self):
        if not 0 < self.rel_step < 1e-2:
            raise ConfigError("rel_step must lie in (0, 1e-2)")
        if self.scheme not in ("central", "forward-at-boundary"):
            raise ConfigError(f"unknown finite-difference scheme {self.scheme!r}")


def _check_q(phi, k, allow_low_q=False, need=0.0):
    if phi.q <= k:
        raise DomainError(f"q = {phi.q:g} <= dim L = {k}: the slice integral may diverge")
    if need and phi.q <= k + need and not allow_low_q:
        raise DomainError(f"q = {phi.q:g} must exceed dim L + 1 = {k + 1} (pass allow_low_q to explore)")


# ------------------------------------------------------------ ray integral --

def ray_integrals(phi, n, k, feet, dirs, lengths):
    """``int_0^R phi(x + r u) r^(d-1) dr`` for each row (x, u, R).

    ``feet`` and ``dirs`` are ``(N, n)`` arrays with ``dirs`` unit and
    orthogonal to ``feet``; ``d = n - k``.
    """
    feet = np.atleast_2d(feet)
    dirs = np.atleast_2d(dirs)
    lengths = np.asarray(lengths, dtype=float).ravel()
    d = n - k
    q = phi.q
    p = q - n
    a = np.linalg.norm(feet, axis=1)
    out = np.zeros(len(lengths))
    pos = lengths > 0
    tiny = pos & (a <= 1e-14 * lengths)
    if np.any(tiny):
        # phi(r u) = r^p phi(u): exact radial integral
        out[tiny] = phi.on_sphere(dirs[tiny]) * lengths[tiny] ** (q - k) / (q - k)
    rest = pos & ~tiny
    if np.any(rest):
        ar, Rr = a[rest], lengths[rest]
        S = np.arcsinh(Rr / ar)
        panels = max(2, int(ceil(float(S.max()) * max(q - k, 1.0) / 2.0)))
        t, w = unit_panels(panels, 8)
        s = S[:, None] * t[None, :]
        ch, sh = np.cosh(s), np.sinh(s)
        # |z| = a cosh s, r = a sinh s, dr = a cosh s ds
        vals = (ar[:, None] ** (p + d)) * ch ** (p + 1.0) * sh ** (d - 1)
        if not phi.is_euclidean:
            r = ar[:, None] * sh
            z = feet[rest][:, None, :] + r[:, :, None] * dirs[rest][:, None, :]
            zn = z / (ar[:, None] * ch)[:, :, None]
            vals = vals * phi.on_sphere(zn.reshape(-1, n)).reshape(vals.shape)
        out[rest] = S * (vals @ w)
    return out


# ------------------------------------------------------- section integrals --

def _adaptive(fn, a, b, order, depth=0, scale=None):
    """Nested Gauss-Legendre bisection of a vectorised scalar integrand."""
    x1, w1 = gauss_legendre(a, b, order)
    x2, w2 = gauss_legendre(a, b, 2 * order)
    i1 = float(w1 @ fn(x1))
    i2 = float(w2 @ fn(x2))
    ref = abs(i2) if scale is None else scale
    if abs(i2 - i1) <= ADAPT_RTOL * max(ref, 1e-300) or depth >= 12:
        return i2
    m = 0.5 * (a + b)
    ref = max(ref, abs(i2))
    return _adaptive(fn, a, m, order, depth + 1, ref) + _adaptive(fn, m, b, order, depth + 1, ref)


def _polygon_integral(phi, n, k, foot, comp, ring, order):
    total = 0.0
    size = float(np.max(np.abs(ring)))
    m = len(ring)
    for i in range(m):
        va, vb = ring[i], ring[(i + 1) % m]
        e = vb - va
        le = np.hypot(e[0], e[1])
        if le <= 1e-15 * size:
            continue
        nrm = np.array([e[1], -e[0]]) / le
        h = float(nrm @ va)
        if abs(h) <= 1e-14 * size:
            continue
        th0 = np.arctan2(va[1], va[0])
        dth = np.arctan2(va[0] * vb[1] - va[1] * vb[0], va @ vb)

        def integrand(th, nrm=nrm, h=h):
            u = np.column_stack([np.cos(th), np.sin(th)])
            R = h / (u @ nrm)
            return ray_integrals(phi, n, k, np.broadcast_to(foot, (len(th), n)), u @ comp, R)

        total += _adaptive(integrand, th0, th0 + dth, order)
    return total


def _triangle_rule_integral(phi, n, k, foot, comp, tri, h, order):
    lam, w = simplex_rule(2, order)
    y = lam @ tri
    ny = np.linalg.norm(y, axis=1)
    u = y / ny[:, None]
    area = 0.5 * np.linalg.norm(np.cross(tri[1] - tri[0], tri[2] - tri[0]))
    vals = h * ny**-3 * ray_integrals(phi, n, k, np.broadcast_to(foot, (len(y), n)), u @ comp, ny)
    return area * float(w @ vals)


def _triangle_integral(phi, n, k, foot, comp, tri, h, order, depth=0):
    i1 = _triangle_rule_integral(phi, n, k, foot, comp, tri, h, order)
    i2 = _triangle_rule_integral(phi, n, k, foot, comp, tri, h, 2 * order)
    if abs(i2 - i1) <= 1e-10 * abs(i2) or depth >= 4:
        return i2
    a, b, c = tri
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    return sum(_triangle_integral(phi, n, k, foot, comp, np.array(t), h, order, depth + 1)
               for t in ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)))


def section_integral(section, phi, n, k, comp, order=8):
    """``int`` of phi over a :class:`~dualcurv.geometry.Section`."""
    d = section.dim
    foot = section.foot
    if section.kind == "ball":
        if phi.is_euclidean:
            u = comp[:1]
            from .quadrature import sphere_area
            area = 2.0 if d == 1 else sphere_area(d)
            return area * float(ray_integrals(phi, n, k, foot[None, :], u, [section.radius])[0])
        U, w = sphere_rule(d, 32)
        vals = ray_integrals(phi, n, k, np.broadcast_to(foot, (len(U), n)), U @ comp,
                             np.full(len(U), section.radius))
        return float(w @ vals)
    v = section.vertices
    if d == 1:
        lo, hi = float(v[0, 0]), float(v[1, 0])
        return _interval_integral(phi, n, k, foot[None, :], comp[0][None, :], np.array([lo]), np.array([hi]))[0]
    if d == 2:
        return _polygon_integral(phi, n, k, foot, comp, v, order)
    total = 0.0
    for t in section.triangles:
        tri = v[t]
        nrm = np.cross(tri[1] - tri[0], tri[2] - tri[0])
        nrm /= np.linalg.norm(nrm)
        h = float(nrm @ tri[0])
        if abs(h) > 1e-14 * float(np.max(np.abs(v))):
            total += _triangle_integral(phi, n, k, foot, comp, tri, h, order)
    return total


def _interval_integral(phi, n, k, feet, axis, lo, hi):
    """Vectorised ``int_lo^hi phi(x + t e) dt`` (signed pieces from the foot point)."""
    m = len(lo)
    ends = np.concatenate([hi, lo])
    f2 = np.concatenate([feet, feet])
    sign = np.where(ends >= 0, 1.0, -1.0)
    dirs = sign[:, None] * np.concatenate([axis, axis]).reshape(2 * m, -1)
    vals = sign * ray_integrals(phi, n, k, f2, dirs, np.abs(ends))
    return vals[:m] - vals[m:]


# ---------------------------------------------------------- slicing values --

def _check_pair(body, L):
    if L.n != body.dim:
        raise DomainError(f"subspace lives in R^{L.n}, body in R^{body.dim}")


def g_value(body, L, phi, x, quad=None):
    """``g(x) = int_{K cap (x + L^perp)} phi(z) dz`` at ``x`` given in L-coordinates."""
    _check_pair(body, L)
    _check_q(phi, L.k)
    quad = quad or QuadratureSpec()
    section = slice_body(body, L, x)
    return section_integral(section, phi, body.dim, L.k, np.asarray(L.complement), quad.order)


def g_values(body, L, phi, X, quad=None):
    """Vectorised :func:`g_value`; points outside ``relint(K|L)`` give NaN."""
    _check_pair(body, L)
    _check_q(phi, L.k)
    quad = quad or QuadratureSpec()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, k = body.dim, L.k
    comp = np.asarray(L.complement)
    if body.is_polytope and n - k == 1:
        lo, hi, valid = section_intervals(body, L, X)
        out = np.full(len(X), np.nan)
        if np.any(valid):
            feet = X[valid] @ L.basis
            out[valid] = _interval_integral(phi, n, k, feet, np.broadcast_to(comp[0], feet.shape),
                                            lo[valid], hi[valid])
        return out

    def one(x):
        try:
            return section_integral(slice_body(body, L, x), phi, n, k, comp, quad.order)
        except DomainError:
            return np.nan

    return np.array(pmap(one, list(X)), dtype=float)


def _radial_fd(body, L, phi, X, fd, quad):
    """``<grad g(x), x>`` for rows of X by differencing along the ray through x.

    Returns ``(g, grad_dot, one_sided)``.
    """
    h = fd.rel_step
    X = np.atleast_2d(X)
    allx = np.vstack([X, (1.0 + h) * X, (1.0 - h) * X])
    vals = g_values(body, L, phi, allx, quad)
    m = len(X)
    g0, gp, gm = vals[:m], vals[m:2 * m], vals[2 * m:]
    central = np.isfinite(gp) & np.isfinite(gm)
    grad = np.where(central, (gp - gm) / (2.0 * h), np.nan)
    one_sided = ~central & np.isfinite(g0)
    if fd.scheme == "forward-at-boundary":
        back = one_sided & np.isfinite(gm)
        fwd = one_sided & ~np.isfinite(gm) & np.isfinite(gp)
        grad = np.where(back, (g0 - gm) / h, grad)
        grad = np.where(fwd, (gp - g0) / h, grad)
    return g0, grad, one_sided


def g_gradient_dot(body, L, phi, x, fd=None, quad=None):
    """``<grad g(x), x>`` by finite differences of ``t -> g((1 + t) x)``.

    The origin is excluded: g need not be Lipschitz there (for the product
    of balls the difference quotient at 0 blows up).
    """
    fd = fd or FDSpec()
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.linalg.norm(x) == 0.0:
        raise DomainError("x = 0 excluded: g is not locally Lipschitz at the origin in general")
    slice_body(body, L, x)  # raises outside relint(K|L)
    g0, grad, one_sided = _radial_fd(body, L, phi, x[None, :], fd, quad)
    if one_sided[0] and fd.scheme == "central":
        raise DomainError("central stencil leaves relint(K|L); use scheme='forward-at-boundary'")
    if not np.isfinite(grad[0]):
        raise DomainError("finite-difference stencil leaves relint(K|L)")
    return float(grad[0])


# -------------------------------------------------------- grids over K|L ----

@dataclass(frozen=True)
class SlicePoint:
    x: tuple
    g: float
    grad_dot: float
    boundary_flag: bool


@dataclass(frozen=True)
class SliceProfile:
    points: tuple

    def rows(self):
        for p in self.points:
            yield list(p.x) + [p.g, p.grad_dot, int(p.boundary_flag)]


def _projection_breaks(body, L):
    """Coordinates in L (k = 1) where the section changes combinatorially."""
    if body.is_polytope:
        return np.unique(body.hrep().vertices @ L.basis[0])
    return np.array([])


def _grid_1d(proj, breaks, s, grid):
    lo, hi = s * proj[0], s * proj[1]
    cuts = np.unique(np.concatenate([[lo, 0.0, hi], breaks[(breaks > lo) & (breaks < hi)]]))
    cuts = cuts[(cuts >= lo) & (cuts <= hi)]
    span = hi - lo
    xs, ws = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= 1e-14 * span:
            continue
        cnt = max(2, int(round(grid * (b - a) / span)))
        x, w = gauss_legendre(a, b, cnt)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs)[:, None], np.concatenate(ws)


def _grid_2d(ring, s, grid):
    """Polar rule on the fan of triangles (0, v_i, v_{i+1}) of s * ring."""
    ring = s * ring
    n_r = max(4, grid // 4)
    pts, wts = [], []
    for i in range(len(ring)):
        va, vb = ring[i], ring[(i + 1) % len(ring)]
        e = vb - va
        nrm = np.array([e[1], -e[0]]) / np.hypot(e[0], e[1])
        h = nrm @ va
        th0 = np.arctan2(va[1], va[0])
        dth = np.arctan2(va[0] * vb[1] - va[1] * vb[0], va @ vb)
        n_t = max(2, int(round(grid * abs(dth) / (2 * pi))))
        th, wt = gauss_legendre(th0, th0 + dth, n_t)
        u = np.column_stack([np.cos(th), np.sin(th)])
        R = h / (u @ nrm)
        t, wr = gauss_legendre(0.0, 1.0, n_r)
        r = R[:, None] * t[None, :]
        pts.append((r[:, :, None] * u[:, None, :]).reshape(-1, 2))
        wts.append((wt[:, None] * R[:, None] * wr[None, :] * r).ravel())
    return np.vstack(pts), np.concatenate(wts)


def _ccw_ring(proj):
    v = np.asarray(proj.hrep().vertices)
    c = v.mean(axis=0)
    return v[np.argsort(np.arctan2(v[:, 1] - c[1], v[:, 0] - c[0]))]


def level_rule(body, L, s, grid, mc_points=100_000, seed=0):
    """Nodes and weights for integrating over ``s * (K|L)``, avoiding x = 0."""
    k = L.k
    proj = project_body(body, L)
    if k == 1:
        if isinstance(proj.shape, Ball):
            extent = np.array([-proj.shape.radius, proj.shape.radius])
        else:
            extent = np.array([proj.hrep().vertices.min(), proj.hrep().vertices.max()])
        return _grid_1d(extent, _projection_breaks(body, L), s, grid)
    if k == 2:
        if isinstance(proj.shape, Ball):
            raise UnsupportedError("grid over a disc projection is not implemented")
        return _grid_2d(_ccw_ring(proj), s, grid)
    if k == 3:
        if not body.is_polytope:
            raise UnsupportedError("k = 3 grids need a polytope")
        verts = s * np.asarray(proj.hrep().vertices)
        lo, hi = verts.min(axis=0), verts.max(axis=0)
        u = uniform_block(seed, 0, mc_points, 3)
        pts = lo + u * (hi - lo)
        inside = proj.contains(pts / s)
        w = np.prod(hi - lo) / mc_points
        return pts[inside], np.full(int(inside.sum()), w)
    raise UnsupportedError(f"gradient integral not available for dim L = {k}")


def slice_profile(body, L, phi, grid=64, fd=None, quad=None):
    """g and <grad g, x> on the quadrature grid of K|L (x = 0 excluded)."""
    _check_pair(body, L)
    _check_q(phi, L.k)
    fd = fd or FDSpec()
    X, _ = level_rule(body, L, 1.0, grid)
    g, grad, flag = _radial_fd(body, L, phi, X, fd, quad)
    keep = np.isfinite(g)
    return SliceProfile(tuple(SlicePoint(tuple(float(c) for c in x), float(a), float(b), bool(f))
                              for x, a, b, f in zip(X[keep], g[keep], grad[keep], flag[keep])))


# ------------------------------------------------------ gradient integral ---

@dataclass(frozen=True)
class GradientIntegral:
    levels: tuple
    shrink: tuple  # e^{-1/m}
    values: tuple
    extrapolated: float
    extrapolated_linear: float
    extrapolation: str
    n_points: int
    one_sided_fraction: float
    slice_mass: float  # int_{K|L} g on the unshrunk grid
    tags: tuple = ()


EXTRAPOLATIONS = {"linear": 1, "quadratic": 2}


def extrapolate(shrink, values, model="quadratic"):
    """Value at gap 0 of a least-squares polynomial in the gap ``1 - shrink``.

    ``model`` fixes the degree (capped by the number of levels minus one).
    """
    if model not in EXTRAPOLATIONS:
        raise ConfigError(f"unknown extrapolation {model!r}")
    gaps = 1.0 - np.asarray(shrink, dtype=float)
    values = np.asarray(values, dtype=float)
    deg = min(EXTRAPOLATIONS[model], len(values) - 1)
    if deg == 0:
        return float(values[-1])
    return float(np.polynomial.polynomial.polyfit(gaps, values, deg)[0])


def default_levels(grid):
    """Shrink levels tied to the grid: (4, 8, 16) at grid 64, doubled with it.

    The extrapolation bias depends on the gaps 1 - e^{-1/m} only and does not
    shrink with the grid, so both are refined together.
    """
    f = grid / REFERENCE_GRID
    return tuple(max(1, int(round(m * f))) for m in DEFAULT_LEVELS)


def gradient_integral(body, L, phi, levels=None, grid=64, fd=None, quad=None,
                      allow_low_q=False, mc_points=100_000, seed=0, extrapolation="quadratic"):
    """``int_{e^{-1/m} K|L} <grad g(x), x> dx`` per level and its limit m -> oo.

    The limit is extrapolated by a polynomial in the gap ``1 - e^{-1/m}``
    (quadratic by default, the linear fit is always reported too). Without
    explicit ``levels`` the grid-scaled :func:`default_levels` are used.
    """
    _check_pair(body, L)
    _check_q(phi, L.k, allow_low_q, need=1.0)
    fd = fd or FDSpec()
    levels = tuple(int(m) for m in (levels or default_levels(grid)))
    if not levels or any(m < 1 for m in levels) or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError("shrink levels must be positive and strictly increasing")
    tags = ()
    if phi.q <= L.k + 1:
        tags = ("outside proven range: q <= dim L + 1",)
    shrink, values, npts, one_sided = [], [], 0, 0
    for m in levels:
        s = exp(-1.0 / m)
        X, w = level_rule(body, L, s, grid, mc_points, seed)
        g, grad, flag = _radial_fd(body, L, phi, X, fd, quad)
        if not np.all(np.isfinite(grad)):
            raise DomainError("gradient undefined at some grid points")
        shrink.append(s)
        values.append(float(w @ grad))
        npts += len(X)
        one_sided += int(flag.sum())
    if npts < MIN_POINTS:
        raise ConfigError(f"grid yields {npts} interior points over all levels (< {MIN_POINTS})")
    X, w = level_rule(body, L, 1.0, grid, mc_points, seed)
    slice_mass = float(w @ g_values(body, L, phi, X, quad))
    return GradientIntegral(levels, tuple(shrink), tuple(values), extrapolate(shrink, values, extrapolation),
                            extrapolate(shrink, values, "linear"), extrapolation,
                            npts, one_sided / npts, slice_mass, tags)


# ------------------------------------------------------- divergence check ---

@dataclass(frozen=True)
class DivergenceReport:
    body: str
    q: float
    k: int
    n: int
    ratio_lhs: float
    ratio_method: str
    total: float
    subspace_mass: float
    kq_term: float
    grad_integral_per_m: tuple
    extrapolated_integral: float
    extrapolation: str
    residual_linear: float
    rhs: float
    residual: float
    slice_mass: float
    slice_mass_expected: float
    grid: int
    n_points: int
    one_sided_fraction: float
    rel_step: float
    ratio_mc: float = None
    ratio_mc_stderr: float = None
    tags: tuple = field(default=())

    def to_dict(self):
        doc = {
            "body": self.body, "q": self.q, "n": self.n, "k": self.k,
            "ratio_lhs": self.ratio_lhs, "ratio_method": self.ratio_method,
            "total": self.total, "subspace": self.subspace_mass,
            "kq_term": self.kq_term,
            "grad_integral_per_m": [{"m": m, "shrink": s, "value": v} for m, s, v in self.grad_integral_per_m],
            "extrapolated_integral": self.extrapolated_integral,
            "extrapolation": self.extrapolation, "residual_linear": self.residual_linear,
            "rhs": self.rhs, "residual": self.residual,
            "slice_mass": self.slice_mass, "slice_mass_expected": self.slice_mass_expected,
            "grid": self.grid, "n_points": self.n_points,
            "one_sided_fraction": self.one_sided_fraction, "rel_step": self.rel_step,
            "tags": list(self.tags),
        }
        if self.ratio_mc is not None:
            doc["ratio_mc"] = self.ratio_mc
            doc["ratio_mc_stderr"] = self.ratio_mc_stderr
        return doc


def divergence_identity_check(body, L, phi, quad=None, grid=64, fd=None, levels=None,
                              allow_low_q=False, mc_check=False, extrapolation="quadratic"):
    """Compare the concentration ratio with ``k/q + int <grad g, x> / (n C(S))``.

    With ``mc_check`` the ratio is also estimated by spherical Monte Carlo
    (``quad.samples`` samples, ``quad.seed``) and reported alongside.
    """
    quad = quad or QuadratureSpec()
    fd = fd or FDSpec()
    n, k = body.dim, L.k
    _check_q(phi, k, allow_low_q, need=1.0)
    rep = concentration_ratio(body, phi, L, quad)
    gi = gradient_integral(body, L, phi, levels, grid, fd, quad, allow_low_q, seed=quad.seed,
                           extrapolation=extrapolation)
    kq = k / phi.q
    rhs = kq + gi.extrapolated / (n * rep.total)
    ratio_mc = se_mc = None
    if mc_check:
        mc = concentration_ratio(body, phi, L, QuadratureSpec("mc", quad.samples, quad.seed, quad.order))
        ratio_mc, se_mc = float(mc.ratio), float(mc.stderr_ratio)
    return DivergenceReport(
        body=body.name, q=float(phi.q), k=k, n=n,
        ratio_lhs=float(rep.ratio), ratio_method=rep.method,
        total=float(rep.total), subspace_mass=float(rep.subspace_mass),
        kq_term=kq,
        grad_integral_per_m=tuple(zip(gi.levels, gi.shrink, gi.values)),
        extrapolated_integral=gi.extrapolated, extrapolation=gi.extrapolation,
        residual_linear=float(rep.ratio - kq - gi.extrapolated_linear / (n * rep.total)),
        rhs=float(rhs), residual=float(rep.ratio - rhs),
        slice_mass=gi.slice_mass, slice_mass_expected=float(n / phi.q * rep.total),
        grid=grid, n_points=gi.n_points, one_sided_fraction=gi.one_sided_fraction,
        rel_step=fd.rel_step, ratio_mc=ratio_mc, ratio_mc_stderr=se_mc, tags=gi.tags,
    )


# --------------------------------------------------------- gradient bounds --

def gradient_bound_constant(n, k, q, gamma):
    """Constant c with <grad g, x> <= c g on the two ranges where a bound is known."""
    coef = (1.0 - gamma) / (1.0 + gamma)
    if k < q <= n:
        return coef * (q - k), "quasiconcave"
    if q >= n + 1:
        return (q - n) + coef * (n - k), "convex"
    if q > n:
        raise OpenRangeError(f"q = {q:g} in (n, n+1) = ({n}, {n + 1}): no gradient bound is known "
                             "in this quasiconvex range")
    raise DomainError(f"q = {q:g} must exceed dim L = {k}")


@dataclass(frozen=True)
class GradientBoundCheck:
    worst: float
    constant: float
    branch: str
    n_points: int
    worst_x: tuple


def radial_grid(body, L, points=32, margin=0.05, directions=None):
    """Points ``t * rho(v) * v`` with ``t`` in [margin, 1 - margin], avoiding 0."""
    from .geometry import radial_many

    proj = project_body(body, L)
    k = L.k
    if directions is None:
        if k == 1:
            directions = np.array([[1.0], [-1.0]])
        elif k == 2:
            th = 2 * pi * (np.arange(8) + 0.5) / 8
            directions = np.column_stack([np.cos(th), np.sin(th)])
        else:
            directions, _ = sphere_rule(3, 3)
    directions = np.atleast_2d(directions)
    rho = radial_many(proj, directions)
    t = margin + (1.0 - 2.0 * margin) * (np.arange(points) + 0.5) / points
    return (t[None, :, None] * (rho[:, None, None] * directions[:, None, :])).reshape(-1, k)


def gradient_bound_check(body, L, phi, gamma, points=32, fd=None, quad=None, margin=0.05):
    """Worst normalised violation ``max (<grad g, x> - c g) / g`` on a radial grid."""
    fd = fd or FDSpec()
    n, k = body.dim, L.k
    c, branch = gradient_bound_constant(n, k, phi.q, gamma)
    X = radial_grid(body, L, points, margin)
    g, grad, _ = _radial_fd(body, L, phi, X, fd, quad)
    ok = np.isfinite(g) & np.isfinite(grad)
    viol = (grad[ok] - c * g[ok]) / g[ok]
    i = int(np.argmax(viol))
    return GradientBoundCheck(float(viol[i]), float(c), branch, int(ok.sum()), tuple(X[ok][i]))
