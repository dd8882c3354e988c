"""Quadrature on [0, 1) and on the unit disc.

Radial integrals use composite Gauss-Legendre on dyadic panels refined toward
r = 1 (where every weight of interest concentrates its mass), with a tanh-sinh
closing panel available for weights that are singular at the endpoint.  Disc
integrals factor into a radial rule times uniform trapezoid in the angle;
the trapezoid order is doubled until two successive results agree, which is
exact once the order exceeds the trigonometric degree of the integrand.

All integrals are taken against the normalised area measure dA = dx dy / pi,
so the disc has measure 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

_MAX_DYADIC_DEPTH = 50  # beyond this 1 - 2^-j is not a distinct float64


@lru_cache(maxsize=64)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel_nodes(edges: np.ndarray, pts: int):
    """Gauss-Legendre nodes/weights on each [edges[i], edges[i+1]]."""
    x, w = _leggauss(pts)
    a = edges[:-1][:, None]
    b = edges[1:][:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


def tanh_sinh_nodes(a: float, b: float, order: int = 40, h: float = 0.12):
    """Tanh-sinh rule on [a, b]; robust for integrable endpoint singularities."""
    k = np.arange(-order, order + 1, dtype=float)
    t = k * h
    half_pi = 0.5 * np.pi
    u = np.tanh(half_pi * np.sinh(t))
    du = half_pi * np.cosh(t) / np.cosh(half_pi * np.sinh(t)) ** 2 * h
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = mid + half * u
    weights = half * du
    inside = (nodes > a) & (nodes < b)
    return nodes[inside], weights[inside]


def dyadic_edges(depth: int, per_level: int = 1) -> np.ndarray:
    """Panel edges 1 - 2^(-j/per_level) up to 1 - 2^-depth, then 1."""
    depth = min(int(depth), _MAX_DYADIC_DEPTH)
    j = np.arange(depth * per_level + 1, dtype=float)
    edges = 1.0 - 2.0 ** (-j / per_level)
    return np.concatenate([edges, [1.0]])


@dataclass(frozen=True)
class RadialRule:
    """Nodes/weights for integrals of the form int_0^1 g(r) dr."""

    nodes: np.ndarray
    weights: np.ndarray
    depth: int
    pts: int

    def integrate(self, values: np.ndarray):
        return np.sum(self.weights * values, axis=-1)


@lru_cache(maxsize=128)
def radial_rule(depth: int = 48, pts: int = 12, close: str = "gl",
                per_level: int = 1) -> RadialRule:
    """Composite rule on dyadic panels toward 1.

    ``close`` selects the treatment of the last panel [1 - 2^-depth, 1]:
    plain Gauss-Legendre or tanh-sinh for endpoint-singular integrands.
    ``per_level`` > 1 subdivides each dyadic level (needed to resolve the
    narrow interior peaks of r^x w(r) at large x for boundary-flat weights).
    """
    edges = dyadic_edges(depth, per_level)
    if close == "tanh_sinh":
        n0, w0 = _panel_nodes(edges[:-1], pts)
        n1, w1 = tanh_sinh_nodes(float(edges[-2]), 1.0)
        nodes = np.concatenate([n0, n1])
        weights = np.concatenate([w0, w1])
    else:
        nodes, weights = _panel_nodes(edges, pts)
    return RadialRule(nodes, weights, depth, pts)


@lru_cache(maxsize=64)
def two_sided_rule(depth_one: int = 48, per_level: int = 2,
                   depth_zero: int = 40, pts: int = 16,
                   close: str = "gl") -> RadialRule:
    """Rule refined dyadically toward both endpoints of [0, 1].

    Needed for integrands r^x w(r) with non-integer x: the fractional power
    is edge-singular at 0 while the weight concentrates near 1.
    """
    down = 2.0 ** (-np.arange(depth_zero, 0, -1, dtype=float))
    j = np.arange(per_level + 1, depth_one * per_level + 1, dtype=float)
    up = 1.0 - 2.0 ** (-j / per_level)
    edges = np.concatenate([[0.0], down, up])
    if close == "tanh_sinh":
        n0, w0 = _panel_nodes(edges, pts)
        n1, w1 = tanh_sinh_nodes(float(edges[-1]), 1.0)
        return RadialRule(np.concatenate([n0, n1]), np.concatenate([w0, w1]),
                          depth_one, pts)
    edges = np.concatenate([edges, [1.0]])
    nodes, weights = _panel_nodes(edges, pts)
    return RadialRule(nodes, weights, depth_one, pts)


def graded_rule(a: float, b: float, toward: float, levels: int, pts: int = 8) -> RadialRule:
    """Geometrically refined rule on [a, b], panels shrinking toward one end.

    ``toward`` must equal ``a`` or ``b``; the finest panel has width
    (b - a) * 2^-levels.
    """
    width = b - a
    levels = min(int(levels), 960)  # 2^-levels must stay a normal float
    scales = np.concatenate([[0.0], 2.0 ** (-np.arange(levels, -1, -1, dtype=float))])
    if toward == a:
        edges = a + width * scales
    elif toward == b:
        edges = b - width * scales[::-1]
    else:
        raise ValueError("'toward' must be one of the interval endpoints")
    edges = np.unique(edges)
    nodes, weights = _panel_nodes(edges, pts)
    return RadialRule(nodes, weights, levels, pts)


def integrate_radial(f, *, rel_tol: float = 1e-10, depth: int = 48,
                     pts: int = 10, close: str = "gl", max_pts: int = 80):
    """Adaptive int_0^1 f(r) dr; f must accept ndarray input.

    Node counts per panel are increased until two successive results agree to
    ``rel_tol``; failing that a QuadratureError carries the achieved estimate.
    """
    prev = None
    while pts <= max_pts:
        rule = radial_rule(depth, pts, close)
        val = float(np.sum(rule.weights * f(rule.nodes)))
        if prev is not None:
            err = abs(val - prev) / max(1.0, abs(val))
            if err <= rel_tol:
                return val
        prev = val
        pts = 2 * pts
    raise QuadratureError(
        f"radial quadrature did not converge to rel_tol={rel_tol}",
        value=prev, achieved=err)


# ---------------------------------------------------------------------------
# Disc quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscQuadrature:
    """Product rule on the disc: radial rule x uniform angles.

    ``angular_order`` is the starting trapezoid order; integration doubles it
    until two successive results agree to ``tolerance``.
    """

    radial: RadialRule
    angular_order: int = 64
    tolerance: float = 1e-10

    @classmethod
    def default(cls, depth: int = 32, pts: int = 12, angular_order: int = 64,
                tolerance: float = 1e-10, close: str = "gl") -> "DiscQuadrature":
        return cls(radial_rule(depth, pts, close), angular_order, tolerance)


def _looks_radial(f, radii: np.ndarray, tol: float = 1e-13) -> bool:
    probe_r = radii[:: max(1, len(radii) // 3)][:3]
    z0 = probe_r.astype(complex)
    z1 = probe_r * np.exp(1j * 2.399963)  # irrational angle, avoids symmetry
    v0, v1 = np.asarray(f(z0)), np.asarray(f(z1))
    scale = np.maximum(1.0, np.abs(v0))
    return bool(np.all(np.abs(v0 - v1) <= tol * scale))


def _angular_chunked(f, r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Mean of f over each circle r_i * e^{i theta}; chunked to bound memory."""
    M = len(theta)
    phases = np.exp(1j * theta)
    out = np.empty(len(r), dtype=complex)
    chunk = max(1, (1 << 22) // M)
    for i in range(0, len(r), chunk):
        block = r[i:i + chunk, None] * phases[None, :]
        out[i:i + chunk] = np.asarray(f(block)).mean(axis=1)
    return out


def integrate_disc(f, w, q: DiscQuadrature | None = None, *, radial: bool | None = None,
                   max_order: int = 1 << 15) -> complex:
    """int_D f(zeta) w(|zeta|) dA(zeta) under the normalised area measure.

    ``f`` maps complex ndarrays to ndarrays.  Radial integrands are detected
    (or declared via ``radial``) and short-circuit the angular factor.
    """
    if q is None:
        q = DiscQuadrature.default()
    r, wr = q.radial.nodes, q.radial.weights
    wvals = np.asarray(w(r), dtype=float)
    if radial is None:
        radial = _looks_radial(f, r)
    if radial:
        vals = np.asarray(f(r.astype(complex)))
        if not np.all(np.isfinite(vals)):
            bad = r[~np.isfinite(vals)][0]
            raise QuadratureError(f"integrand not finite at node r={bad}")
        return complex(2.0 * np.sum(wr * r * wvals * vals))
    M = max(8, q.angular_order)
    prev = None
    while M <= max_order:
        theta = 2.0 * np.pi * np.arange(M) / M
        means = _angular_chunked(f, r, theta)
        if not np.all(np.isfinite(means)):
            bad = r[~np.isfinite(means)][0]
            raise QuadratureError(f"integrand not finite on circle r={bad}")
        val = complex(2.0 * np.sum(wr * r * wvals * means))
        if prev is not None and abs(val - prev) <= q.tolerance * max(1.0, abs(val)):
            return val
        prev = val
        M *= 2
    raise QuadratureError(
        f"angular order exceeded {max_order} without convergence",
        value=prev, achieved=abs(val - prev))


def region_nodes(center: complex, radius: float, *, radial_levels: int = 6,
                 radial_pts: int = 8, angular_order: int = 32,
                 graded_toward_origin: bool = False):
    """Polar product nodes for a Euclidean disc |z - center| < radius.

    Returns (zeta, jac) with sum(jac * g(zeta)) ~ int g dA over the disc.
    With ``graded_toward_origin`` the radial mesh refines toward rho = 0,
    which (for a disc centred at 0) resolves integrands singular there.
    """
    if graded_toward_origin:
        rr = graded_rule(0.0, radius, 0.0, radial_levels, radial_pts)
    else:
        rr = graded_rule(0.0, radius, radius, max(2, radial_levels // 2), radial_pts)
    theta = 2.0 * np.pi * np.arange(angular_order) / angular_order
    rho = rr.nodes[:, None]
    zeta = center + rho * np.exp(1j * theta)[None, :]
    jac = (rr.weights[:, None] * rr.nodes[:, None] / (np.pi)) * \
        (2.0 * np.pi / angular_order) * np.ones_like(theta)[None, :]
    return zeta.ravel(), jac.ravel()


def integrate_region(f, w, disc, *, angular_order: int = 32, radial_levels: int = 6,
                     radial_pts: int = 8, rel_tol: float = 1e-9,
                     graded_toward_origin: bool = False, max_order: int = 1 << 12) -> complex:
    """int over a hyperbolic disc of f * w dA via its Euclidean polar image.

    Weights vanish identically on their support gaps, so a disc contained in
    a gap integrates to exactly 0.0.
    """
    c = complex(disc.euclid_center)
    R = float(disc.euclid_radius)
    M = angular_order
    prev = None
    while M <= max_order:
        zeta, jac = region_nodes(c, R, radial_levels=radial_levels,
                                 radial_pts=radial_pts, angular_order=M,
                                 graded_toward_origin=graded_toward_origin)
        wv = np.asarray(w(np.abs(zeta)), dtype=float)
        fv = np.asarray(f(zeta))
        if not np.all(np.isfinite(fv[wv != 0.0])):
            bad = zeta[(wv != 0.0) & ~np.isfinite(fv)][0]
            raise QuadratureError(f"integrand not finite at node {bad}")
        val = complex(np.sum(jac * wv * fv))
        if prev is not None and abs(val - prev) <= rel_tol * max(1.0, abs(val)):
            return val
        prev = val
        M *= 2
    return prev
