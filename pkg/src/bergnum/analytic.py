"""Symbols: analytic functions with dual coefficient/evaluator form, plus the
general (non-analytic) test symbols used by the oscillation and operator
batteries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .config import DEFAULT_KAPPA, DEFAULTS
from .errors import ConfigError

__all__ = ["AnalyticFunction", "GeneralSymbol", "analytic_battery",
           "general_symbol", "parse_symbol"]


@dataclass
class AnalyticFunction:
    """An analytic function carried as coefficients and/or an evaluator.

    When both representations are present they agree to 1e-10 at sample
    points (see the battery tests); operations prefer whichever channel is
    cheaper and cross-check through the tests, not at call time.
    """

    name: str
    coeffs: np.ndarray | None = None
    fn: Callable | None = None
    dfn: Callable | None = None
    budget: int = 0
    analytic: bool = field(default=True, init=False)

    def __post_init__(self):
        if self.coeffs is None and self.fn is None:
            raise ConfigError("analytic function needs coefficients or an evaluator")
        if self.coeffs is not None:
            self.coeffs = np.asarray(self.coeffs, dtype=complex)
            if not self.budget:
                self.budget = len(self.coeffs) - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.fn is not None:
            return self.fn(z)
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        if self.dfn is not None:
            return self.dfn(z)
        if self.coeffs is None or len(self.coeffs) < 2:
            return np.zeros_like(z)
        dc = self.coeffs[1:] * np.arange(1, len(self.coeffs))
        return np.polynomial.polynomial.polyval(z, dc)

    def coefficient(self, k: int) -> complex:
        if self.coeffs is None or k >= len(self.coeffs):
            return 0.0 + 0.0j
        return complex(self.coeffs[k])


@dataclass
class GeneralSymbol:
    """A measurable symbol on the disc, not assumed analytic."""

    name: str
    fn: Callable
    analytic: bool = field(default=False, init=False)
    coeffs = None

    def __call__(self, z):
        return self.fn(np.asarray(z, dtype=complex))


# ---------------------------------------------------------------------------
# The battery
# ---------------------------------------------------------------------------

def _monomial(k: int) -> AnalyticFunction:
    c = np.zeros(k + 1, dtype=complex)
    c[k] = 1.0
    return AnalyticFunction(f"z^{k}" if k != 1 else "z", coeffs=c)


def _log_inv(degree: int) -> AnalyticFunction:
    c = np.zeros(degree + 1, dtype=complex)
    k = np.arange(1, degree + 1)
    c[1:] = 1.0 / k
    return AnalyticFunction(
        "log_inv", coeffs=c,
        fn=lambda z: np.log(1.0 / (1.0 - z)),
        dfn=lambda z: 1.0 / (1.0 - z))


def _lacunary(top: int) -> AnalyticFunction:
    c = np.zeros(2 ** top + 1, dtype=complex)
    for k in range(top + 1):
        c[2 ** k] = 1.0
    return AnalyticFunction("lacunary", coeffs=c)


def _frac_sing(degree: int, power: float = 0.3) -> AnalyticFunction:
    # coefficients of (1-z)^(-power), truncated
    j = np.arange(degree + 1, dtype=float)
    c = np.exp(gammaln(j + power) - gammaln(power) - gammaln(j + 1.0))
    return AnalyticFunction("frac_sing", coeffs=c.astype(complex))


def analytic_battery(config=DEFAULTS) -> dict[str, AnalyticFunction]:
    b = config.battery
    return {
        "z": _monomial(1),
        "z2": _monomial(2),
        "log_inv": _log_inv(b.log_inv_degree),
        "lacunary": _lacunary(b.lacunary_terms),
        "frac_sing": _frac_sing(b.frac_sing_degree),
    }


def general_symbol(name: str, kappa: float = DEFAULT_KAPPA):
    """Named non-analytic symbols: re_z, abs2, conj_z, hyp_dist, radial_log,
    invabs:p=<p>, const:<c>."""
    if name == "re_z":
        return GeneralSymbol("re_z", lambda z: z.real.astype(complex))
    if name == "abs2":
        return GeneralSymbol("abs2", lambda z: (np.abs(z) ** 2).astype(complex))
    if name == "conj_z" or name == "conj(z)":
        return GeneralSymbol("conj_z", np.conj)
    if name == "hyp_dist":
        return GeneralSymbol(
            "hyp_dist",
            lambda z: (2.0 * kappa * np.arctanh(np.minimum(np.abs(z), 1 - 1e-16))
                       ).astype(complex))
    if name == "radial_log":
        return GeneralSymbol(
            "radial_log",
            lambda z: (1.0 - np.log1p(-np.abs(z))).astype(complex))
    if name.startswith("invabs:"):
        p = float(name.split("p=", 1)[1])

        def inv_abs(z, _p=p):
            a = np.abs(z)
            with np.errstate(divide="ignore", over="ignore"):
                return np.where(a > 0, a ** (-2.0 / _p), np.inf).astype(complex)

        return GeneralSymbol(f"invabs(p={p:g})", inv_abs)
    if name.startswith("const:"):
        cval = complex(name.split(":", 1)[1])
        return GeneralSymbol(f"const:{cval}", lambda z: np.full_like(z, cval))
    raise ConfigError(f"unknown symbol {name!r}")


def parse_symbol(spec: str, config=DEFAULTS):
    """Resolve a symbol name: battery names, poly:<c0,c1,...>, const:<c>,
    conj(z), re_z, abs2, hyp_dist, radial_log, invabs:p=<p>."""
    spec = spec.strip()
    battery = analytic_battery(config)
    if spec in battery:
        return battery[spec]
    if spec.startswith("poly:"):
        coeffs = [complex(part) for part in spec[5:].split(",")]
        return AnalyticFunction(spec, coeffs=np.asarray(coeffs, dtype=complex))
    return general_symbol(spec)
