"""Hyperbolic geometry of the unit disc.

Distances follow beta(z, w) = 2*kappa*artanh(rho(z, w)) with the
pseudo-hyperbolic distance rho = |z - w| / |1 - conj(z) w|.  The metric scale
kappa is configurable; kappa = 1/2 is the classical normalisation used by
default, and rescaling kappa only rescales disc radii, so every statement
formulated "for r large enough" is convention-robust.

A hyperbolic disc is an honest Euclidean disc; the closed-form centre/radius
of the Moebius image are exact, which the region quadrature relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_KAPPA
from .errors import ConstructionError

__all__ = ["Point", "beta", "pseudo_distance", "mobius", "hyperbolic_disc",
           "hyperbolic_midpoint", "HyperbolicDisc", "HyperbolicLattice", "lattice"]


@dataclass(frozen=True)
class Point:
    """A point of the open disc; mostly a validating wrapper over complex."""

    re: float
    im: float = 0.0

    def __post_init__(self):
        if self.re * self.re + self.im * self.im >= 1.0:
            raise ConstructionError(f"point {self.re}+{self.im}j lies outside the disc")

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)


def _as_complex(z) -> complex:
    return z.z if isinstance(z, Point) else complex(z)


def pseudo_distance(z, w):
    z, w = _as_complex(z), _as_complex(w)
    denom = abs(1.0 - np.conj(z) * w)
    return abs(z - w) / denom if denom > 0 else 1.0


def beta(z, w, kappa: float = DEFAULT_KAPPA) -> float:
    """Hyperbolic distance; symmetric, vanishes iff z == w."""
    rho = pseudo_distance(z, w)
    return 2.0 * kappa * math.atanh(min(rho, 1.0 - 1e-17))


def mobius(a, z):
    """The involution phi_a(z) = (a - z) / (1 - conj(a) z)."""
    a = _as_complex(a)
    z = np.asarray(z, dtype=complex)
    return (a - z) / (1.0 - np.conj(a) * z)


@dataclass(frozen=True)
class HyperbolicDisc:
    """Metric ball Delta(center, radius_hyp) together with its Euclidean data.

    ``pseudo_radius`` is the s with beta(0, s) = radius_hyp; the Euclidean
    centre/radius are the exact Moebius-image formulas
        c (1 - s^2) / (1 - s^2 |c|^2),   s (1 - |c|^2) / (1 - s^2 |c|^2).
    """

    center: complex
    radius_hyp: float
    metric_scale: float
    pseudo_radius: float
    euclid_center: complex
    euclid_radius: float

    def contains(self, z) -> bool:
        return abs(_as_complex(z) - self.euclid_center) < self.euclid_radius

    def modulus_range(self) -> tuple[float, float]:
        lo = max(0.0, abs(self.euclid_center) - self.euclid_radius)
        hi = abs(self.euclid_center) + self.euclid_radius
        return lo, hi


def hyperbolic_disc(c, r: float, kappa: float = DEFAULT_KAPPA) -> HyperbolicDisc:
    if r <= 0:
        raise ConstructionError("hyperbolic radius must be positive")
    c = _as_complex(c)
    s = math.tanh(r / (2.0 * kappa))
    denom = 1.0 - s * s * abs(c) ** 2
    center = c * (1.0 - s * s) / denom
    radius = s * (1.0 - abs(c) ** 2) / denom
    return HyperbolicDisc(c, r, kappa, s, center, radius)


def hyperbolic_midpoint(a: float, b: float) -> float:
    """Midpoint of two points of [0, 1) along the real geodesic."""
    return math.tanh(0.5 * (math.atanh(a) + math.atanh(b)))


@dataclass(frozen=True)
class HyperbolicLattice:
    """Rings of points with hyperbolic spacing ~ delta/2.

    Guarantees: pairwise distance >= delta/2 by construction of the radial and
    angular steps, and every z with |z| <= 1 - 2^-max_level lies within delta
    of some lattice point.
    """

    separation: float
    max_level: int
    kappa: float
    points: np.ndarray  # complex

    def __len__(self):
        return len(self.points)

    def moduli(self) -> np.ndarray:
        return np.abs(self.points)

    def to_csv(self, path) -> None:
        import csv
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re", "im", "weight"])
            for z in self.points:
                writer.writerow([f"{z.real:.17g}", f"{z.imag:.17g}", "1"])


def lattice(delta: float, max_level: int, kappa: float = DEFAULT_KAPPA) -> HyperbolicLattice:
    """Build the ring lattice; refuses max_level > 40 (node explosion)."""
    if delta <= 0:
        raise ConstructionError("lattice separation must be positive")
    if max_level > 40:
        raise ConstructionError("max_level > 40 would explode the node count")
    h = delta / 2.0
    r_max = 1.0 - 2.0 ** (-max_level)
    beta_max = 2.0 * kappa * math.atanh(r_max)
    # regular rings spaced h, with the outermost ring exactly at the target
    # depth (so its point count tracks the level) and at least h outside the
    # last regular ring (preserving the separation invariant)
    inner = max(0, math.floor((beta_max - h) / h))
    radii = [i * h for i in range(1, inner + 1)] + [beta_max]
    rho_star = math.tanh(delta / (4.0 * kappa))  # pseudo-radius of beta = delta/2
    pts = [0.0 + 0.0j]
    for i, ring_beta in enumerate(radii, start=1):
        r = math.tanh(ring_beta / (2.0 * kappa))
        # exact angular step putting adjacent ring points at pseudo-distance rho_star
        s = rho_star * (1.0 - r * r) / (2.0 * r * math.sqrt(1.0 - rho_star ** 2))
        dtheta = 2.0 * math.asin(min(1.0, s))
        # floor keeps adjacent ring points at least delta/2 apart; the
        # covering slack absorbs the slightly wider spacing
        count = max(1, math.floor(2.0 * math.pi / dtheta)) if dtheta > 0 else 1
        offset = 0.5 * (i % 2)  # stagger alternate rings
        angles = 2.0 * math.pi * (np.arange(count) + offset) / count
        pts.extend(r * np.exp(1j * angles))
    return HyperbolicLattice(delta, max_level, kappa, np.asarray(pts, dtype=complex))
