"""Radial weights on [0, 1): evaluation, moments, tails, derived weights.

A radial weight w extends to the disc by w(z) = w(|z|).  The two quantities
everything else is built from are the moments

    moment(w, x) = int_0^1 r^x w(r) dr        (x >= 0, decreasing in x)

and the tail

    tail(w, r) = int_r^1 w(s) ds              (positive, decreasing).

Weights from the standard families carry closed forms (Beta functions); the
generic path integrates on a dyadic-refined Gauss-Legendre grid.  Log-domain
variants (log_moment / log_tail) keep classification ratios finite for
weights such as exp(-c/(1-r)) whose tails underflow long before the grids
bottom out.
"""

from __future__ import annotations

import json
import math
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import betainc, betaln, gammaln

from .errors import ConfigError, ConstructionError, QuadratureError
from .quadrature import integrate_radial, radial_rule, two_sided_rule

__all__ = [
    "RadialWeight", "MomentTable", "BetaMixture",
    "moment", "tail", "generalized_moment", "derived_weight",
    "product_weight", "tail_weight",
    "unit_weight", "std_weight", "power_weight", "exponential_weight",
    "piecewise_weight", "expression_weight", "parse_weight", "weight_from_json",
]


# ---------------------------------------------------------------------------
# Closed forms: finite mixtures  sum_i c_i r^{k_i} (1-r)^{a_i}
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BetaMixture:
    """Weights of the form sum_i c_i r^{k_i} (1-r)^{a_i} with a_i > -1.

    Moments are exact Beta integrals; the family is closed under
    multiplication by (1-r)^beta and by polynomials in r, which is what the
    derived-weight constructions need.
    """

    terms: tuple[tuple[float, float, float], ...]  # (coef, k, a)

    def moment(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, k, a in self.terms:
            out = out + c * np.exp(betaln(x + k + 1.0, a + 1.0))
        return out

    def tail(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c, k, a in self.terms:
            total = math.exp(betaln(k + 1.0, a + 1.0))
            out = out + c * total * betainc(a + 1.0, k + 1.0, 1.0 - r)
        return out

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c, k, a in self.terms:
            out = out + c * r ** k * (1.0 - r) ** a
        return out

    def shifted(self, beta: float) -> "BetaMixture":
        return BetaMixture(tuple((c, k, a + beta) for c, k, a in self.terms))

    def times_poly(self, coeffs) -> "BetaMixture":
        """Multiply by sum_j coeffs[j] r^j."""
        new = []
        for c, k, a in self.terms:
            for j, d in enumerate(coeffs):
                if d != 0.0:
                    new.append((c * d, k + j, a))
        return BetaMixture(tuple(new))

    def times_mixture(self, other: "BetaMixture") -> "BetaMixture":
        new = []
        for c1, k1, a1 in self.terms:
            for c2, k2, a2 in other.terms:
                new.append((c1 * c2, k1 + k2, a1 + a2))
        return BetaMixture(tuple(new))

    def tail_poly(self):
        """Tail as polynomial coefficients in r, when all exponents are integers."""
        if not all(float(k).is_integer() and float(a).is_integer() and a >= 0
                   for _, k, a in self.terms):
            return None
        deg = max(int(k + a) for _, k, a in self.terms) + 2
        coeffs = np.zeros(deg)
        const = 0.0
        for c, k, a in self.terms:
            k, a = int(k), int(a)
            for j in range(a + 1):
                b = c * math.comb(a, j) * (-1.0) ** j / (k + j + 1)
                const += b
                coeffs[k + j + 1] -= b
        coeffs[0] += const
        return coeffs


# ---------------------------------------------------------------------------
# The weight type
# ---------------------------------------------------------------------------

_VALIDATION_GRID = np.concatenate([
    np.linspace(0.0, 0.9, 33), 1.0 - 2.0 ** (-np.arange(4, 40, 2, dtype=float))])


class RadialWeight:
    """A radial weight with optional closed-form moment/tail channels.

    Instances are immutable after construction apart from internal caches,
    which are guarded by a lock and idempotent, so all operations are safe to
    call from concurrent workers.
    """

    def __init__(self, name, fn, *, closed_form_moment=None, closed_form_tail=None,
                 log_fn=None, support_gaps=(), smoothness="smooth",
                 mixture: BetaMixture | None = None, validate: bool = True):
        self.name = name
        self.fn = fn
        self.mixture = mixture
        if mixture is not None and closed_form_moment is None:
            closed_form_moment = mixture.moment
        if mixture is not None and closed_form_tail is None:
            closed_form_tail = mixture.tail
        self.closed_form_moment = closed_form_moment
        self.closed_form_tail = closed_form_tail
        self.log_fn = log_fn
        self.support_gaps = tuple(support_gaps)
        self.smoothness = smoothness
        self._lock = threading.Lock()
        self._grid_cache: dict = {}
        self._odd_cache: np.ndarray | None = None
        if validate:
            self._validate()

    # -- construction checks ------------------------------------------------

    def _validate(self):
        for lo, hi in self.support_gaps:
            if hi >= 1.0 - 1e-12:
                raise ConstructionError(
                    f"weight '{self.name}': support gap ({lo}, {hi}) reaches the "
                    "boundary, so its tail vanishes and the spaces collapse")
        vals = np.asarray(self(_VALIDATION_GRID), dtype=float)
        if np.any(vals < 0.0) or not np.all(np.isfinite(vals[_VALIDATION_GRID < 1.0 - 1e-12])):
            bad = _VALIDATION_GRID[(vals < 0) | ~np.isfinite(vals)][0]
            raise ConstructionError(f"weight '{self.name}' negative or non-finite at r={bad}")

    # -- evaluation ----------------------------------------------------------

    def __call__(self, r):
        return self.fn(np.asarray(r, dtype=float))

    def log_eval(self, r):
        r = np.asarray(r, dtype=float)
        if self.log_fn is not None:
            return self.log_fn(r)
        with np.errstate(divide="ignore"):
            return np.log(self(r))

    def __repr__(self):
        return f"RadialWeight({self.name!r})"

    # -- quadrature grid (shared by the generic moment/tail paths) -----------

    def _grid(self, depth=48, pts=16):
        key = (depth, pts)
        with self._lock:
            cached = self._grid_cache.get(key)
        if cached is not None:
            return cached
        close = "tanh_sinh" if self.smoothness == "endpoint_singular" else "gl"
        rule = two_sided_rule(depth, 2, 40, pts, close)
        wv = np.asarray(self(rule.nodes), dtype=float)
        logs = np.asarray(self.log_eval(rule.nodes), dtype=float)
        entry = (rule, wv, logs)
        with self._lock:
            self._grid_cache.setdefault(key, entry)
        return entry

    def _quad_moments(self, xs, rel_tol=1e-10):
        """Vectorised int_0^1 r^x w(r) dr on the cached grid, cross-checked."""
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        out = None
        for pts in (16, 24):
            rule, wv, _ = self._grid(pts=pts)
            logr = np.log(rule.nodes)
            vals = np.empty_like(xs)
            chunk = 8192
            for i in range(0, len(xs), chunk):
                powers = np.exp(np.outer(xs[i:i + chunk], logr))
                vals[i:i + chunk] = powers @ (rule.weights * wv)
            if out is None:
                out = vals
            else:
                err = np.max(np.abs(vals - out) / np.maximum(np.abs(vals), 1e-300))
                if err > 100 * rel_tol:
                    raise QuadratureError(
                        f"moments of '{self.name}' did not converge", achieved=float(err))
                out = vals
        return out

    # -- public moment/tail channels -----------------------------------------

    def moment(self, x):
        scalar = np.isscalar(x)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(xs < 0):
            raise ValueError("moments require x >= 0")
        if self.closed_form_moment is not None:
            out = np.asarray(self.closed_form_moment(xs), dtype=float)
        else:
            out = self._quad_moments(xs)
        return float(out[0]) if scalar else out

    def tail(self, r):
        scalar = np.isscalar(r)
        rs = np.atleast_1d(np.asarray(r, dtype=float))
        if np.any((rs < 0) | (rs >= 1)):
            raise ValueError("tail requires 0 <= r < 1")
        if self.closed_form_tail is not None:
            out = np.asarray(self.closed_form_tail(rs), dtype=float)
        else:
            out = self._quad_tail(rs)
        return float(out[0]) if scalar else out

    def _quad_tail(self, rs):
        # substitute s = 1 - (1-r) v so the dyadic refinement lands near s = 1
        rule, _, _ = self._grid()
        v = 1.0 - rule.nodes[::-1]
        wts = rule.weights[::-1]
        out = np.empty_like(rs)
        for i, r in enumerate(rs):
            s = 1.0 - (1.0 - r) * v
            out[i] = (1.0 - r) * np.sum(wts * self(s))
        return out

    def log_moment(self, x):
        """log of moment(x), stable when the moment underflows float64."""
        scalar = np.isscalar(x)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if self.closed_form_moment is not None:
            with np.errstate(divide="ignore"):
                vals = np.log(np.asarray(self.closed_form_moment(xs), dtype=float))
            if np.all(np.isfinite(vals)):
                return float(vals[0]) if scalar else vals
        rule, _, logw = self._grid()
        logr = np.log(rule.nodes)
        logq = np.log(rule.weights)
        base = logq + logw
        out = np.empty_like(xs)
        for i, x1 in enumerate(xs):
            t = base + x1 * logr
            m = np.max(t)
            out[i] = m + np.log(np.sum(np.exp(t - m))) if np.isfinite(m) else -np.inf
        return float(out[0]) if scalar else out

    def log_tail(self, r):
        """log of tail(r), stable at depths where the tail underflows."""
        scalar = np.isscalar(r)
        rs = np.atleast_1d(np.asarray(r, dtype=float))
        if self.closed_form_tail is not None:
            with np.errstate(divide="ignore"):
                vals = np.log(np.asarray(self.closed_form_tail(rs), dtype=float))
            if np.all(np.isfinite(vals) | np.isneginf(vals)):
                return float(vals[0]) if scalar else vals
        rule, _, _ = self._grid()
        v = 1.0 - rule.nodes[::-1]
        logq = np.log(rule.weights[::-1])
        out = np.empty_like(rs)
        for i, r1 in enumerate(rs):
            s = 1.0 - (1.0 - r1) * v
            t = logq + np.asarray(self.log_eval(s), dtype=float)
            m = np.max(t)
            out[i] = -np.inf if not np.isfinite(m) else \
                np.log1p(-r1) + m + np.log(np.sum(np.exp(t - m)))
        return float(out[0]) if scalar else out

    def odd_moments(self, n_max: int) -> np.ndarray:
        """omega_{2n+1} for n = 0..n_max; cached, grows monotonically."""
        with self._lock:
            cached = self._odd_cache
        if cached is not None and len(cached) > n_max:
            return cached[:n_max + 1]
        xs = 2.0 * np.arange(n_max + 1, dtype=float) + 1.0
        vals = self.moment(xs)
        with self._lock:
            if self._odd_cache is None or len(self._odd_cache) <= n_max:
                self._odd_cache = vals
        return vals


@dataclass
class MomentTable:
    """Lazy, lock-guarded cache of moments of one weight.

    Recomputation is idempotent: values are reproducible to ``quad_tolerance``
    by construction, so double fills under contention are harmless.
    """

    weight: RadialWeight
    quad_tolerance: float = 1e-10
    values: dict = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def get(self, x: float) -> float:
        key = float(x)
        with self._lock:
            if key in self.values:
                return self.values[key]
        val = float(self.weight.moment(key))
        with self._lock:
            self.values.setdefault(key, val)
        return val

    def fill(self, xs) -> np.ndarray:
        vals = self.weight.moment(np.asarray(xs, dtype=float))
        with self._lock:
            for x, v in zip(np.atleast_1d(xs), np.atleast_1d(vals)):
                self.values.setdefault(float(x), float(v))
        return vals


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------

def moment(w: RadialWeight, x) -> float:
    """int_0^1 r^x w(r) dr."""
    return w.moment(x)


def tail(w: RadialWeight, r) -> float:
    """int_r^1 w(s) ds."""
    return w.tail(r)


def generalized_moment(w: RadialWeight, factors, x) -> float:
    """int_0^1 r^x (prod_j (1 - r^{y_j})^{n_j}) w(r) dr.

    ``factors`` is a list of (n_j, y_j) pairs with positive integer entries.
    """
    factors = list(factors)
    for n_j, y_j in factors:
        if int(n_j) != n_j or int(y_j) != y_j or n_j < 1 or y_j < 1:
            raise ValueError("factors must be pairs of positive integers")
    if not factors:
        return w.moment(x)
    if w.closed_form_moment is not None:
        # expand the product into a signed sum of plain moments
        shifts = {0: 1.0}
        for n_j, y_j in factors:
            for _ in range(int(n_j)):
                new: dict[int, float] = {}
                for s, c in shifts.items():
                    new[s] = new.get(s, 0.0) + c
                    new[s + int(y_j)] = new.get(s + int(y_j), 0.0) - c
                shifts = new
        xs = np.array([x + s for s in shifts], dtype=float)
        coefs = np.array([shifts[s] for s in shifts], dtype=float)
        return float(np.dot(coefs, w.moment(xs)))

    def integrand(r):
        prod = np.ones_like(r)
        for n_j, y_j in factors:
            prod = prod * (1.0 - r ** y_j) ** n_j
        return r ** x * prod * w(r)

    close = "tanh_sinh" if w.smoothness == "endpoint_singular" else "gl"
    return integrate_radial(integrand, rel_tol=1e-11, close=close)


def derived_weight(w: RadialWeight, kind: str, *, beta: float | None = None,
                   nu: RadialWeight | None = None, gamma: float | None = None) -> RadialWeight:
    """Build w(r)(1-r)^beta, w(r)*tail(nu)(r), or w(r)/tail(nu)(r)^gamma."""
    if kind == "power_shift":
        if beta is None:
            raise ValueError("power_shift requires beta")
        mixture = w.mixture.shifted(beta) if w.mixture is not None else None
        return RadialWeight(
            f"{w.name}*(1-r)^{beta:g}",
            lambda r, _w=w, _b=beta: _w(r) * (1.0 - r) ** _b,
            mixture=mixture,
            support_gaps=w.support_gaps,
            smoothness="endpoint_singular" if beta < 0 else w.smoothness)
    if kind == "product_tail":
        if nu is None:
            raise ValueError("product_tail requires nu")
        mixture = None
        if w.mixture is not None and nu.mixture is not None:
            poly = nu.mixture.tail_poly()
            if poly is not None:
                mixture = w.mixture.times_poly(poly)
        return RadialWeight(
            f"{w.name}*hat[{nu.name}]",
            lambda r, _w=w, _n=nu: _w(r) * _n.tail(np.asarray(r, dtype=float)),
            mixture=mixture,
            support_gaps=w.support_gaps, smoothness=w.smoothness)
    if kind == "inverse_tail_power":
        if nu is None or gamma is None:
            raise ValueError("inverse_tail_power requires nu and gamma")
        if gamma <= 0:
            raise ValueError("gamma must be positive")

        def fn(r, _w=w, _n=nu, _g=gamma):
            return _w(r) / _n.tail(np.asarray(r, dtype=float)) ** _g

        out = RadialWeight(f"{w.name}/hat[{nu.name}]^{gamma:g}", fn,
                           support_gaps=w.support_gaps,
                           smoothness="endpoint_singular")
        try:
            m0 = out.moment(0.0)
        except QuadratureError as exc:
            raise ConstructionError(
                f"gamma={gamma} too large: moments diverge ({exc})") from exc
        if not math.isfinite(m0):
            raise ConstructionError(f"gamma={gamma} too large: zeroth moment diverges")
        return out
    raise ValueError(f"unknown derived weight kind {kind!r}")


def product_weight(w: RadialWeight, nu: RadialWeight) -> RadialWeight:
    """The pointwise product w(r) nu(r) as a weight."""
    mixture = None
    if w.mixture is not None and nu.mixture is not None:
        mixture = w.mixture.times_mixture(nu.mixture)
    smooth = w.smoothness
    if "piecewise" in (w.smoothness, nu.smoothness):
        smooth = "piecewise_constant"
    elif "endpoint_singular" in (w.smoothness, nu.smoothness):
        smooth = "endpoint_singular"
    return RadialWeight(
        f"{w.name}*{nu.name}",
        lambda r, _w=w, _n=nu: _w(r) * _n(r),
        mixture=mixture,
        support_gaps=tuple(w.support_gaps) + tuple(nu.support_gaps),
        smoothness=smooth)


def tail_weight(nu: RadialWeight) -> RadialWeight:
    """The tail r -> int_r^1 nu as a weight in its own right."""
    mixture = None
    if nu.mixture is not None:
        poly = nu.mixture.tail_poly()
        if poly is not None:
            base = BetaMixture(((1.0, 0.0, 0.0),))
            mixture = base.times_poly(poly)
    return RadialWeight(
        f"hat[{nu.name}]",
        lambda r, _n=nu: _n.tail(np.asarray(r, dtype=float)),
        mixture=mixture, smoothness="smooth")


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------

def unit_weight() -> RadialWeight:
    return RadialWeight("one", lambda r: np.ones_like(r),
                        mixture=BetaMixture(((1.0, 0.0, 0.0),)))


def power_weight(beta: float) -> RadialWeight:
    if beta <= -1:
        raise ConstructionError("power weight requires beta > -1")
    return RadialWeight(
        f"(1-r)^{beta:g}",
        lambda r, _b=beta: (1.0 - r) ** _b,
        mixture=BetaMixture(((1.0, 0.0, float(beta)),)),
        smoothness="endpoint_singular" if beta < 0 else "smooth")


def std_weight(alpha: float) -> RadialWeight:
    """The standard family (alpha+1)(1-r^2)^alpha, alpha > -1."""
    if alpha <= -1:
        raise ConstructionError("standard weight requires alpha > -1")
    a = float(alpha)

    def fn(r):
        return (a + 1.0) * ((1.0 - r) * (1.0 + r)) ** a

    def cf_moment(x):
        x = np.asarray(x, dtype=float)
        return (a + 1.0) / 2.0 * np.exp(betaln((x + 1.0) / 2.0, a + 1.0))

    half_beta = math.exp(betaln(0.5, a + 1.0))

    def cf_tail(r):
        r = np.asarray(r, dtype=float)
        u = (1.0 - r) * (1.0 + r)
        return (a + 1.0) / 2.0 * half_beta * betainc(a + 1.0, 0.5, u)

    mixture = None
    if float(a).is_integer() and a >= 0:
        ai = int(a)
        mixture = BetaMixture(tuple(
            ((a + 1.0) * math.comb(ai, j), float(j), a) for j in range(ai + 1)))
    return RadialWeight(f"std(alpha={alpha:g})", fn,
                        closed_form_moment=cf_moment, closed_form_tail=cf_tail,
                        mixture=mixture,
                        smoothness="endpoint_singular" if a < 0 else "smooth")


def exponential_weight(c: float = 1.0, b: float = 1.0) -> RadialWeight:
    """exp(-c / (1-r)^b): positive, all moments finite, tail beyond every power."""
    if c <= 0 or b <= 0:
        raise ConstructionError("exponential weight requires c > 0 and b > 0")

    def fn(r):
        with np.errstate(divide="ignore"):
            return np.exp(-c / (1.0 - r) ** b)

    def log_fn(r):
        with np.errstate(divide="ignore"):
            return -c / (1.0 - r) ** b

    return RadialWeight(f"exp(c={c:g},beta={b:g})", fn, log_fn=log_fn,
                        smoothness="endpoint_singular")


def piecewise_weight(breaks, values, name: str = "piecewise") -> RadialWeight:
    """Constant value[i] on [breaks[i], breaks[i+1]); exact moments and tails.

    ``breaks`` must start at 0 and end at 1 (exclusive pieces of [0, 1)).
    """
    breaks = np.asarray(breaks, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(breaks) != len(values) + 1:
        raise ConstructionError("need len(breaks) == len(values) + 1")
    if breaks[0] != 0.0 or abs(breaks[-1] - 1.0) > 1e-15 or np.any(np.diff(breaks) <= 0):
        raise ConstructionError("breaks must increase from 0 to 1")
    if np.any(values < 0):
        raise ConstructionError("piecewise values must be nonnegative")

    def fn(r):
        idx = np.clip(np.searchsorted(breaks, r, side="right") - 1, 0, len(values) - 1)
        return values[idx]

    def cf_moment(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        p = x[:, None] + 1.0
        upper = breaks[None, 1:] ** p
        lower = breaks[None, :-1] ** p
        return np.sum(values[None, :] * (upper - lower), axis=1) / (x + 1.0)

    masses = values * np.diff(breaks)
    suffix = np.concatenate([np.cumsum(masses[::-1])[::-1], [0.0]])

    def cf_tail(r):
        r = np.asarray(r, dtype=float)
        idx = np.clip(np.searchsorted(breaks, r, side="right") - 1, 0, len(values) - 1)
        return suffix[idx + 1] + values[idx] * (breaks[idx + 1] - r)

    gaps = tuple((float(breaks[i]), float(breaks[i + 1]))
                 for i in range(len(values)) if values[i] == 0.0)
    return RadialWeight(name, fn, closed_form_moment=cf_moment,
                        closed_form_tail=cf_tail, support_gaps=gaps,
                        smoothness="piecewise_constant")


# ---------------------------------------------------------------------------
# Expression grammar: numbers, r, + - * / ^, exp(), log(), pow(,)
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\d+\.?\d*(?:[eE][+-]?\d+)?|[rR]|exp|log|pow|[-+*/^(),])")


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ConfigError(f"bad token in weight expression at: {text[pos:pos+12]!r}")
        out.append(m.group(1))
        pos = m.end()
    out.append("<end>")
    return out


class _ExprParser:
    """Recursive-descent parser producing an ndarray-valued closure in r."""

    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def eat(self, tok=None):
        cur = self.toks[self.i]
        if tok is not None and cur != tok:
            raise ConfigError(f"expected {tok!r}, found {cur!r}")
        self.i += 1
        return cur

    def parse(self):
        node = self.expr()
        if self.peek() != "<end>":
            raise ConfigError(f"trailing input {self.peek()!r} in weight expression")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in "+-":
            op = self.eat()
            rhs = self.term()
            node = (lambda f, g: lambda r: f(r) + g(r))(node, rhs) if op == "+" \
                else (lambda f, g: lambda r: f(r) - g(r))(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek() in "*/":
            op = self.eat()
            rhs = self.unary()
            node = (lambda f, g: lambda r: f(r) * g(r))(node, rhs) if op == "*" \
                else (lambda f, g: lambda r: f(r) / g(r))(node, rhs)
        return node

    def unary(self):
        if self.peek() == "-":
            self.eat()
            inner = self.unary()
            return lambda r, _f=inner: -_f(r)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.eat()
            expo = self.unary()
            return lambda r, _b=base, _e=expo: _b(r) ** _e(r)
        return base

    def atom(self):
        tok = self.eat()
        if tok == "(":
            node = self.expr()
            self.eat(")")
            return node
        if tok in ("r", "R"):
            return lambda r: r
        if tok == "exp":
            self.eat("(")
            inner = self.expr()
            self.eat(")")
            return lambda r, _f=inner: np.exp(_f(r))
        if tok == "log":
            self.eat("(")
            inner = self.expr()
            self.eat(")")
            return lambda r, _f=inner: np.log(_f(r))
        if tok == "pow":
            self.eat("(")
            base = self.expr()
            self.eat(",")
            expo = self.expr()
            self.eat(")")
            return lambda r, _b=base, _e=expo: _b(r) ** _e(r)
        try:
            val = float(tok)
        except ValueError:
            raise ConfigError(f"unexpected token {tok!r} in weight expression") from None
        return lambda r, _v=val: np.full_like(np.asarray(r, dtype=float), _v)


def expression_weight(text: str, name: str | None = None) -> RadialWeight:
    node = _ExprParser(_tokenize(text)).parse()

    def fn(r, _node=node):
        return _node(np.asarray(r, dtype=float)) * np.ones_like(np.asarray(r, dtype=float))

    return RadialWeight(name or f"expr:{text}", fn, smoothness="endpoint_singular")


# ---------------------------------------------------------------------------
# Name grammar and JSON documents
# ---------------------------------------------------------------------------

def _parse_params(text: str) -> dict:
    params = {}
    if not text:
        return params
    for part in text.split(","):
        if "=" not in part:
            raise ConfigError(f"bad weight parameter {part!r}")
        key, val = part.split("=", 1)
        params[key.strip()] = float(val)
    return params


def parse_weight(spec: str) -> RadialWeight:
    """Resolve a weight name: std:alpha=<a>, exp:c=<c>[,beta=<b>],
    power:beta=<b>, pw:<file>, expr:<expression>, counterexample:default|<file>.
    """
    spec = spec.strip()
    kind, _, rest = spec.partition(":")
    if kind == "std":
        params = _parse_params(rest)
        return std_weight(params.get("alpha", 0.0))
    if kind == "exp":
        params = _parse_params(rest)
        return exponential_weight(params.get("c", 1.0), params.get("beta", 1.0))
    if kind == "power":
        params = _parse_params(rest)
        return power_weight(params.get("beta", 1.0))
    if kind in ("one", "unit"):
        return unit_weight()
    if kind == "pw":
        doc = json.loads(Path(rest).read_text(encoding="utf-8"))
        return piecewise_weight(doc["breaks"], doc["values"], doc.get("name", "piecewise"))
    if kind == "expr":
        return expression_weight(rest)
    if kind == "counterexample":
        from .counterexample import default_gap_weight, gap_weight_from_json
        if rest in ("default", ""):
            return default_gap_weight().weight
        return gap_weight_from_json(Path(rest)).weight
    raise ConfigError(f"unknown weight spec {spec!r}")


def weight_from_json(doc: dict | str | Path) -> RadialWeight:
    """Load a weight from the documented JSON form:
    {"name": ..., "kind": standard|exponential|piecewise|expression, "params": {...}}.
    """
    if not isinstance(doc, dict):
        doc = json.loads(Path(doc).read_text(encoding="utf-8"))
    kind = doc.get("kind")
    params = doc.get("params", {})
    name = doc.get("name")
    extra = set(doc) - {"name", "kind", "params"}
    if extra:
        raise ConfigError(f"unknown keys in weight document: {sorted(extra)}")
    if kind == "standard":
        w = std_weight(params.get("alpha", 0.0))
    elif kind == "exponential":
        w = exponential_weight(params.get("c", 1.0), params.get("beta", 1.0))
    elif kind == "piecewise":
        w = piecewise_weight(params["breaks"], params["values"])
    elif kind == "expression":
        w = expression_weight(params["text"])
    else:
        raise ConfigError(f"unknown weight kind {kind!r}")
    if name:
        w.name = name
    return w
