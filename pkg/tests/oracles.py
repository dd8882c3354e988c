"""Independent oracles used to freeze expected values.

These deliberately avoid the package's own quadrature/series machinery:
a tanh-sinh rule written from scratch, brute midpoint Riemann sums, and a
dense-grid covering check.  Slow and dumb on purpose.
"""

from __future__ import annotations

import math

import numpy as np


def tanh_sinh(f, a: float, b: float, order: int = 60, h: float = 0.08) -> float:
    """Plain tanh-sinh rule on (a, b); handles endpoint singularities."""
    k = np.arange(-order, order + 1, dtype=float)
    t = k * h
    half_pi = 0.5 * math.pi
    u = np.tanh(half_pi * np.sinh(t))
    du = half_pi * np.cosh(t) / np.cosh(half_pi * np.sinh(t)) ** 2 * h
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    x = mid + half * u
    inside = (x > a) & (x < b)
    return float(np.sum(half * du[inside] * f(x[inside])))


def exp_sinh(f, a: float, order: int = 60, h: float = 0.08) -> float:
    """exp-sinh rule on (a, infinity) for decaying integrands."""
    k = np.arange(-order, order + 1, dtype=float)
    t = k * h
    x = a + np.exp(0.5 * math.pi * np.sinh(t))
    dx = np.exp(0.5 * math.pi * np.sinh(t)) * 0.5 * math.pi * np.cosh(t) * h
    return float(np.sum(dx * f(x)))


def riemann_midpoint(f, a: float, b: float, n: int = 10_000_000) -> float:
    """Brute midpoint rule; chunked so n = 1e7 stays in memory."""
    total = 0.0
    step = (b - a) / n
    chunk = 1_000_000
    for i0 in range(0, n, chunk):
        i = np.arange(i0, min(i0 + chunk, n), dtype=float)
        x = a + (i + 0.5) * step
        total += float(np.sum(f(x)))
    return total * step


def covered(points: np.ndarray, targets: np.ndarray, delta: float,
            kappa: float) -> bool:
    """Every target within hyperbolic distance delta of some point."""
    for t in targets:
        rho = np.abs(t - points) / np.abs(1.0 - np.conj(points) * t)
        d = 2.0 * kappa * np.arctanh(np.minimum(rho, 1 - 1e-15))
        if float(np.min(d)) > delta:
            return False
    return True
