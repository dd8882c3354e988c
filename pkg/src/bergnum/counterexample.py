"""Gap weights: piecewise-constant radial weights with zero-mass hyperbolic discs.

Given an increasing profile function psi with 2 (1 - r^2) psi'(r) > 1, the
construction places breakpoints t_1 = 0 < t_2 < ... -> 1 solving
beta(t_n, t_{n+1}) = 2 psi(t_{n+1}), puts the constant a_n on [t_2n, t_2n+1]
with mass a_n (t_2n+1 - t_2n) = 2^-n exactly, and leaves every odd annulus
empty.  The resulting weight has doubling tails (each gap start sees exactly
half the previous tail) but the gaps are hyperbolically unbounded, so the
disc around each gap midpoint with radius psi(midpoint) carries zero mass.

Breakpoints escape to the boundary doubly exponentially: 1 - t_n underflows
float64 from n = 5 on already for the default profile.  All bookkeeping is
therefore carried in the boundary log-coordinate

    B = beta_{kappa=1}(0, t) = log((1+t)/(1-t)),    t = tanh(B/2),

in which the construction is a plain recurrence and tails, moments and disc
containment are exact at any depth.  A float-view RadialWeight is exposed for
the classifier and quadrature layers; its closed-form moments and tails are
computed from the log-coordinate data and include the analytic remainder of
the (conceptually infinite) sequence of pieces, so e.g. the tail at t_2n is
exactly 2^(1-n) no matter how many pairs are materialised.

The construction closes only under the kappa = 1 metric convention: with
kappa = 1/2, the hypothesis on psi forces the defining equation to have no
root, which is validated (and reported) at runtime.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from .config import GAP_WEIGHT_KAPPA
from .errors import ConstructionError
from .weights import RadialWeight

__all__ = ["GapWeightProfile", "build_gap_weight", "default_gap_weight",
           "gap_weight_from_json", "default_profile_fn"]

_LN2 = math.log(2.0)


def _logcosh(x):
    x = np.asarray(x, dtype=float)
    return np.abs(x) + np.log1p(np.exp(-2.0 * np.abs(x))) - _LN2


def _logsinh(x):
    x = np.asarray(x, dtype=float)
    small = x < 0.1
    with np.errstate(divide="ignore"):
        direct = np.where(small, np.log(np.sinh(np.where(small, x, 1.0))), 0.0)
    stable = x + np.log1p(-np.exp(-2.0 * np.minimum(x, 700.0))) - _LN2
    return np.where(small, direct, stable)


def _log_t_diff(b1, b2):
    """log( tanh(b2/2) - tanh(b1/2) ), stable for huge b."""
    return _logsinh((np.asarray(b2) - np.asarray(b1)) / 2.0) \
        - _logcosh(np.asarray(b2) / 2.0) - _logcosh(np.asarray(b1) / 2.0)


def _log_t(b):
    """log tanh(b/2); -inf at b = 0."""
    b = np.asarray(b, dtype=float)
    e = np.exp(-b)
    with np.errstate(divide="ignore"):
        return np.log1p(-e) - np.log1p(e)


def default_profile_fn(r):
    """The reference profile (3/8) log((1+r)/(1-r)) + 1; slope dead-centre in
    the admissible window."""
    r = np.asarray(r, dtype=float)
    return 0.375 * np.log((1.0 + r) / (1.0 - r)) + 1.0


@dataclass(frozen=True)
class GapWeightProfile:
    """A constructed gap weight, exact in boundary log-coordinates.

    ``B[j]`` is the log-coordinate of breakpoint t_{j+1} (so ``B[0] = 0``);
    support pair n occupies ``[B[2n-1], B[2n]]`` and gap n is
    ``[B[2n], B[2n+1]]``.  ``masses[n-1] = 2^-n`` exactly.
    """

    psi_B: Callable
    B: np.ndarray
    masses: np.ndarray
    log_a: np.ndarray
    kappa: float
    n_pairs: int
    weight: RadialWeight

    # -- breakpoint views ----------------------------------------------------

    @property
    def t_seq(self) -> np.ndarray:
        """Float view of the breakpoints (saturates to 1.0 once unrepresentable)."""
        return np.tanh(self.B / 2.0)

    @property
    def a_seq(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_a)

    @property
    def r_mid_B(self) -> np.ndarray:
        """Log-coordinates of the gap midpoints r_n (hyperbolic midpoints)."""
        n = np.arange(1, self.n_pairs + 1)
        return 0.5 * (self.B[2 * n] + self.B[2 * n + 1])

    @property
    def r_seq(self) -> np.ndarray:
        return np.tanh(self.r_mid_B / 2.0)

    # -- exact tail ------------------------------------------------------------

    def tail_at_B(self, b: float) -> float:
        """Exact tail of the infinite weight at the point with log-coordinate b."""
        if b < 0:
            raise ValueError("log-coordinate must be >= 0")
        j = int(np.searchsorted(self.B, b, side="right")) - 1  # b in [B[j], B[j+1])
        if j >= len(self.B) - 1:
            raise ConstructionError(
                "query beyond the materialised breakpoints; rebuild with more pairs")
        if j < 1 or j % 2 == 0:
            # initial gap (j <= 0) or gap n = j//2: suffix mass 2^-(j//2)
            return 2.0 ** (-(max(j, 0) // 2))
        n = (j + 1) // 2  # support pair n: B in [B[2n-1], B[2n])
        frac = math.exp(float(_log_t_diff(b, self.B[2 * n])
                              - _log_t_diff(self.B[2 * n - 1], self.B[2 * n])))
        return 2.0 ** (-n) * (1.0 + min(frac, 1.0))

    def tail_at_index(self, j: int) -> float:
        """Exact tail at breakpoint t_j (1-based); at j = 2n this is 2^(1-n)."""
        if not 1 <= j <= len(self.B):
            raise IndexError("breakpoint index out of range")
        if j == 1:
            return 1.0
        return self.tail_at_B(float(self.B[j - 1]))

    # -- zero-mass discs -------------------------------------------------------

    def gap_disc(self, n: int):
        """(B_lo, B_center, B_hi, radius) of the disc around gap midpoint n."""
        if not 1 <= n <= self.n_pairs:
            raise IndexError("gap index out of range")
        center = float(self.r_mid_B[n - 1])
        radius = float(self.psi_B(center))
        return center - radius, center, center + radius, radius

    def gap_disc_mass(self, n: int) -> float:
        """Weighted mass of Delta(r_n, psi(r_n)); exactly 0.0 when the disc
        sits inside gap n, which the construction guarantees."""
        lo, _, hi, _ = self.gap_disc(n)
        gap_lo, gap_hi = float(self.B[2 * n]), float(self.B[2 * n + 1])
        if lo < gap_lo or hi > gap_hi:
            # cannot happen for an admissible profile; report rather than guess
            raise ConstructionError(
                f"disc around gap midpoint {n} leaves the empty annulus "
                f"([{lo:.6g}, {hi:.6g}] vs gap [{gap_lo:.6g}, {gap_hi:.6g}])")
        return 0.0

    def gap_containment_margin(self, n: int) -> float:
        """min distance (log-coordinate) between the disc and the gap edges."""
        lo, _, hi, _ = self.gap_disc(n)
        return min(lo - float(self.B[2 * n]), float(self.B[2 * n + 1]) - hi)

    # -- defining-equation residuals -------------------------------------------

    def recurrence_residuals(self) -> np.ndarray:
        """|beta(t_n, t_{n+1}) - 2 psi(t_{n+1})| / max(1, B_{n+1}).

        Relative because the deepest breakpoints sit at log-coordinates far
        beyond where float64 can hold an absolute 1e-12.
        """
        b = self.B
        res = np.abs((b[1:] - b[:-1]) - 2.0 * np.asarray(self.psi_B(b[1:])))
        return res / np.maximum(1.0, b[1:])


def _moment_fn(B, masses, log_a, n_pairs):
    """Exact closed-form moments of the piecewise weight + analytic remainder."""
    L = _log_t(B)  # log t_j at python index j-1
    idx = np.arange(1, n_pairs + 1)
    # support pair n spans math indices (2n, 2n+1) = python (2n-1, 2n)
    L1 = L[2 * idx - 1]
    L2 = L[2 * idx]
    logdt = np.asarray(_log_t_diff(B[2 * idx - 1], B[2 * idx]), dtype=float)

    def cf_moment(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xp1 = x[:, None] + 1.0
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            ratio = np.exp(logdt - L1)             # (t2 - t1)/t1, may underflow to 0
            delta = np.log1p(ratio)                # log(t2/t1)
            log_delta = np.where(delta > 0.0, np.log(np.where(delta > 0, delta, 1.0)),
                                 logdt - L1)
            u = xp1 * delta[None, :]
            big = u > 1e-6
            log_num_big = np.where(big, np.log(-np.expm1(-np.where(big, u, 1.0))), 0.0)
            log_num_small = np.log(xp1) + log_delta[None, :] + np.log1p(-u / 2.0)
            log_num = np.where(big, log_num_big, log_num_small)
            log_g = xp1 * L2[None, :] + log_num - np.log(xp1) - logdt[None, :]
            g = np.exp(log_g)
        vals = g @ masses + 2.0 ** (-n_pairs)
        return vals

    return cf_moment


def build_gap_weight(psi_B: Callable | None = None, *, psi_r: Callable | None = None,
                     psi_r_deriv: Callable | None = None, n_terms: int = 24,
                     kappa: float = GAP_WEIGHT_KAPPA, bisect_tol: float = 2.5e-13,
                     name: str = "gap-weight") -> GapWeightProfile:
    """Construct a gap weight for the profile psi.

    ``psi_B`` gives psi as a function of the log-coordinate B; alternatively
    pass ``psi_r`` (with optional derivative) in the r variable.  The
    derivative hypothesis 2 (1 - r^2) psi'(r) > 1 is checked on a sample grid
    (equivalently psi_B' > 1/4), and root existence for the defining equation
    requires psi_B' < 1/2; profiles outside (1/4, 1/2) are rejected with the
    sign analysis.
    """
    if kappa != GAP_WEIGHT_KAPPA:
        raise ConstructionError(
            "the gap construction is pinned to the kappa = 1 metric convention; "
            "under kappa = 1/2 the admissibility window for psi is empty")
    if n_terms < 1:
        raise ConstructionError("need at least one pair")
    if psi_B is None:
        if psi_r is None:
            psi_B = lambda b: 0.375 * np.asarray(b, dtype=float) + 1.0
            psi_r = default_profile_fn
        else:
            psi_B = lambda b, _f=psi_r: _f(np.tanh(np.asarray(b, dtype=float) / 2.0))

    # derivative hypothesis on a sample grid
    if psi_r_deriv is not None:
        rs = np.linspace(0.0, 0.999, 200)
        if np.any(2.0 * (1.0 - rs ** 2) * np.asarray(psi_r_deriv(rs)) <= 1.0):
            raise ConstructionError("profile violates 2(1-r^2) psi'(r) > 1")
    else:
        bs = np.linspace(0.0, 60.0, 241)
        slopes = np.diff(np.asarray(psi_B(bs), dtype=float)) / np.diff(bs)
        if np.any(slopes <= 0.25):
            raise ConstructionError(
                "profile violates 2(1-r^2) psi'(r) > 1 (log-coordinate slope <= 1/4)")

    vals = np.asarray(psi_B(np.linspace(0.0, 10.0, 11)), dtype=float)
    if np.any(vals < 0.0):
        raise ConstructionError("psi must be nonnegative")

    # recurrence B_{j+1} - B_j = 2 psi_B(B_{j+1}) by bracketing + bisection
    n_break = 2 * n_terms + 2
    B = np.empty(n_break)
    B[0] = 0.0
    for j in range(1, n_break):
        prev = B[j - 1]

        def g(b):
            return b - prev - 2.0 * float(psi_B(b))

        lo = prev
        hi = max(prev + 1.0, 1.0)
        tries = 0
        while g(hi) <= 0.0:
            hi = 2.0 * hi + 4.0
            tries += 1
            if tries > 200 or not math.isfinite(hi):
                raise ConstructionError(
                    "construction infeasible for this psi: the defining equation "
                    "B - B_prev - 2 psi(B) stays negative (psi grows at least half "
                    "the boundary rate), so no breakpoint exists")
        while hi - lo > bisect_tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if g(mid) <= 0.0:
                lo = mid
            else:
                hi = mid
        B[j] = 0.5 * (lo + hi)

    idx = np.arange(1, n_terms + 1)
    masses = 2.0 ** (-idx.astype(float))
    logdt = np.asarray(_log_t_diff(B[2 * idx - 1], B[2 * idx]), dtype=float)
    log_a = np.log(masses) - logdt

    weight = _float_view(B, masses, log_a, n_terms, psi_B, name)
    return GapWeightProfile(psi_B=psi_B, B=B, masses=masses, log_a=log_a,
                            kappa=kappa, n_pairs=n_terms, weight=weight)


def _float_view(B, masses, log_a, n_pairs, psi_B, name) -> RadialWeight:
    """RadialWeight adapter: float-representable pieces + exact closed forms."""
    t = np.tanh(B / 2.0)
    pieces = []  # (lo, hi, value) on representable support
    gaps = [(0.0, float(t[1]))] if t[1] < 1.0 - 1e-12 else []
    for n in range(1, n_pairs + 1):
        lo, hi = float(t[2 * n - 1]), float(t[2 * n])
        if lo < 1.0 and lo < hi:
            pieces.append((lo, min(hi, 1.0), math.exp(min(log_a[n - 1], 700.0))))
            gap_hi = float(t[2 * n + 1]) if 2 * n + 1 < len(t) else 1.0
            if hi < 1.0 - 1e-12 and hi < gap_hi:
                gaps.append((hi, min(gap_hi, 1.0 - 1e-9)))
    lows = np.array([p[0] for p in pieces])
    highs = np.array([p[1] for p in pieces])
    vals = np.array([p[2] for p in pieces])

    def fn(r):
        r = np.asarray(r, dtype=float)
        i = np.searchsorted(lows, r, side="right") - 1
        i = np.clip(i, 0, len(lows) - 1)
        inside = (r >= lows[i]) & (r < highs[i])
        return np.where(inside, vals[i], 0.0)

    cf_moment = _moment_fn(B, masses, log_a, n_pairs)

    def cf_tail(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        b = 2.0 * np.arctanh(np.minimum(r, 1.0 - 1e-17))
        out = np.empty_like(r)
        for i, b1 in enumerate(b):
            out[i] = _tail_at(B, n_pairs, float(b1))
        return out

    w = RadialWeight(name, fn, closed_form_moment=cf_moment,
                     closed_form_tail=cf_tail,
                     support_gaps=tuple(gaps)[:8],
                     smoothness="piecewise_constant", validate=False)
    w._validate()
    return w


def _tail_at(B, n_pairs, b: float) -> float:
    j = int(np.searchsorted(B, b, side="right")) - 1
    j = min(j, len(B) - 2)
    if j < 1 or j % 2 == 0:
        return 2.0 ** (-(max(j, 0) // 2))
    n = (j + 1) // 2
    frac = math.exp(float(_log_t_diff(b, B[2 * n]) - _log_t_diff(B[2 * n - 1], B[2 * n])))
    return 2.0 ** (-n) * (1.0 + min(frac, 1.0))


@lru_cache(maxsize=4)
def default_gap_weight(n_terms: int = 24) -> GapWeightProfile:
    return build_gap_weight(n_terms=n_terms, name="counterexample:default")


def gap_weight_from_json(doc: dict | str | Path) -> GapWeightProfile:
    """Build from {"psi": {"kind": "affine_log", "slope": s, "intercept": c},
    "n_terms": N}; slope is in the log-coordinate (admissible: 1/4 < s < 1/2)."""
    if not isinstance(doc, dict):
        doc = json.loads(Path(doc).read_text(encoding="utf-8"))
    psi = doc.get("psi", {})
    if psi.get("kind", "affine_log") != "affine_log":
        raise ConstructionError(f"unsupported psi kind {psi.get('kind')!r}")
    slope = float(psi.get("slope", 0.375))
    intercept = float(psi.get("intercept", 1.0))
    return build_gap_weight(
        psi_B=lambda b: slope * np.asarray(b, dtype=float) + intercept,
        n_terms=int(doc.get("n_terms", 24)),
        name=doc.get("name", f"gap-weight(slope={slope:g})"))
