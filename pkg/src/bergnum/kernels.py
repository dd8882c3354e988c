"""Reproducing kernel series and their weighted p-norms.

For a radial weight w the reproducing kernel of the weighted analytic
square-integrable space is the power series

    K_z(zeta) = sum_n b_n (conj(z) zeta)^n,     b_n = 1 / (2 moment(2n+1)),

with positive nondecreasing coefficients.  Truncations carry an empirical
geometric certificate: beyond an onset index the coefficient ratios stay
below q, so the dropped tail after n terms is at most

    b_n (q u)^(n+1) / (1 - q u),    u = |conj(z) zeta| <= radius budget.

Norm integrals of the factored kernels (1 - conj(z) zeta)^N K_z factor into
a radial rule times angular means; the means come from Parseval for p = 2
and from FFT sampling of the coefficient polynomial for general p, so the
cost stays linear in the truncation length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import TruncationError
from .quadrature import _leggauss, radial_rule
from .weights import RadialWeight, derived_weight

__all__ = ["TailCertificate", "KernelSeries", "kernel_series", "eval_kernel",
           "eval_kernel_on", "modified_kernel", "modified_coeffs",
           "kernel_lp_norm", "kernel_norm_bound", "factored_series_residual",
           "log_kernel_ratio"]


@dataclass(frozen=True)
class TailCertificate:
    """Empirical geometric majorant of the coefficient sequence."""

    q: float
    n_onset: int
    radius_budget: float

    def tail_bound(self, b_n: float, n: int, u: float) -> float:
        qu = self.q * u
        if qu >= 1.0:
            return math.inf
        return b_n * qu ** (n + 1) / (1.0 - qu)


class KernelSeries:
    """Truncated kernel coefficient table for one weight.

    Immutable after construction; the derived-coefficient cache is guarded by
    the GIL-atomic dict operations and recomputation is idempotent.
    ``suffix_q[n]`` majorises every coefficient ratio from index n on, so the
    tail beyond n is certified by b_n (suffix_q[n] u)^(n+1) / (1 - suffix_q[n] u);
    the staged ratios tighten the bound near the radius budget where the
    onset ratio alone would be uselessly loose.
    """

    def __init__(self, weight: RadialWeight, coeffs: np.ndarray,
                 cert: TailCertificate, suffix_q: np.ndarray):
        self.weight = weight
        self.coeffs = coeffs
        self.n_max = len(coeffs) - 1
        self.cert = cert
        self.suffix_q = suffix_q
        self._mod_cache: dict[int, np.ndarray] = {}

    def __repr__(self):
        return (f"KernelSeries({self.weight.name!r}, n_max={self.n_max}, "
                f"q={self.cert.q:.6f}, budget={self.cert.radius_budget})")

    def to_csv(self, path) -> None:
        import csv
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "b_n"])
            for n, b in enumerate(self.coeffs):
                writer.writerow([n, f"{b:.17g}"])

    def tail_bound_at(self, n: int, u: float) -> float:
        q = float(self.suffix_q[min(n, len(self.suffix_q) - 1)])
        if q * u >= 1.0:
            return math.inf
        return float(self.coeffs[n]) * (q * u) ** (n + 1) / (1.0 - q * u)

    def truncation_index(self, u: float, tol: float) -> int:
        """Smallest n with certified tail below tol at radius u; the series is
        then summed over 0..n."""
        u = abs(u)
        if u > self.cert.radius_budget * (1.0 + 1e-12):
            raise TruncationError(
                f"radius {u:.6g} exceeds the certificate budget "
                f"{self.cert.radius_budget:.6g}; rebuild with a larger budget",
                bound=math.inf)
        b = self.coeffs
        n = np.arange(len(b), dtype=float)
        q = self.suffix_q
        with np.errstate(under="ignore", over="ignore", invalid="ignore"):
            qu = q * u
            bound = np.where(qu < 1.0,
                             b * qu ** (n + 1.0) / np.maximum(1.0 - qu, 1e-300),
                             np.inf)
        ok = bound <= tol
        if not ok.any():
            raise TruncationError(
                f"no truncation below tol={tol} within n_max={self.n_max} at "
                f"radius {u:.6g}", bound=float(bound[-1]))
        return int(np.argmax(ok))


def kernel_series(w: RadialWeight, n_max: int | None = None,
                  radius_budget: float = 0.95, *, rel_tol: float = 1e-12,
                  n_cap: int = 1 << 21) -> KernelSeries:
    """Build the coefficient table with an empirical tail certificate.

    ``n_max`` defaults to what the budget needs: enough terms that the
    geometric factor budget^n alone reaches rel_tol with margin.
    """
    if not 0.0 < radius_budget < 1.0:
        raise ValueError("radius budget must lie in (0, 1)")
    fixed_n = n_max is not None
    if n_max is None:
        need = math.log(rel_tol * (1.0 - radius_budget) / 8.0) / math.log(radius_budget)
        n_max = int(min(n_cap, max(512, 1.2 * need + 64)))
    while True:
        odd = w.odd_moments(n_max)
        b = 1.0 / (2.0 * odd)
        if not np.all(np.isfinite(b)):
            raise TruncationError("kernel coefficients overflow float64",
                                  partial=b)
        ratios = b[1:] / b[:-1]
        # suffix-max of the ratios: index n majorises every later ratio
        suffix = np.maximum.accumulate(ratios[::-1])[::-1]
        suffix = np.concatenate([suffix, suffix[-1:]])
        ok = suffix * radius_budget < 1.0
        if ok.any():
            onset = int(np.argmax(ok))
            series = KernelSeries(
                w, b, TailCertificate(float(suffix[onset]), onset,
                                      radius_budget), suffix)
            # self-check: the certificate must actually reach rel_tol at the
            # budget; coefficient growth can demand more terms than the
            # geometric factor alone suggests
            if fixed_n or n_max >= n_cap or \
                    series.tail_bound_at(n_max, radius_budget) <= rel_tol:
                return series
        elif fixed_n or n_max >= n_cap:
            raise TruncationError(
                f"no geometric certificate below n_max={n_max} for budget "
                f"{radius_budget}", partial=b, bound=float(suffix[-1]))
        n_max = int(min(n_cap, 2 * n_max))


def _polyval(u, coeffs: np.ndarray):
    return np.polynomial.polynomial.polyval(u, coeffs)


def eval_kernel(K: KernelSeries, z, zeta, *, tol: float = 1e-12,
                with_bound: bool = False):
    """K_z(zeta) summed to the certified truncation."""
    u = np.conj(complex(z)) * complex(zeta)
    n_star = K.truncation_index(abs(u), tol)
    val = complex(_polyval(u, K.coeffs[:n_star + 1]))
    if with_bound:
        return val, K.tail_bound_at(n_star, abs(u))
    return val


def eval_kernel_on(K: KernelSeries, z, zetas: np.ndarray, *,
                   tol: float = 1e-12) -> np.ndarray:
    """Vectorised K_z over an array of points."""
    zetas = np.asarray(zetas, dtype=complex)
    u = np.conj(complex(z)) * zetas
    umax = float(np.max(np.abs(u))) if u.size else 0.0
    n_star = K.truncation_index(umax, tol)
    return _polyval(u, K.coeffs[:n_star + 1])


def modified_coeffs(K: KernelSeries, N: int) -> np.ndarray:
    """Coefficients of (1 - u)^N K(u): signed binomial convolution."""
    if N < 0:
        raise ValueError("N must be >= 0")
    cached = K._mod_cache.get(N)
    if cached is not None:
        return cached
    b = K.coeffs
    c = np.zeros(len(b) + N)
    for j in range(N + 1):
        c[j:j + len(b)] += (-1.0) ** j * math.comb(N, j) * b
    K._mod_cache[N] = c
    return c


def modified_kernel(K: KernelSeries, z, zeta, N: int, *, tol: float = 1e-12):
    """(1 - conj(z) zeta)^N K_z(zeta)."""
    u = np.conj(complex(z)) * complex(zeta)
    return (1.0 - u) ** N * eval_kernel(K, z, zeta, tol=tol)


# ---------------------------------------------------------------------------
# Weighted p-norms of the factored kernels
# ---------------------------------------------------------------------------

def _angular_mean_pow(c: np.ndarray, log_abs_c: np.ndarray, u: float, p: float,
                      tol: float) -> float:
    """mean over the circle of |sum_n c_n (u e^{i theta})^n|^p.

    Exact Parseval for p = 2; FFT sampling otherwise.  The series is cut
    where the log-domain majorant log|c_n| + n log u falls ``tol`` below its
    peak, so the work per radius is linear in the effective length only.
    """
    if u == 0.0:
        return float(abs(c[0]) ** p)
    n_all = np.arange(len(c), dtype=float)
    logs = log_abs_c + n_all * math.log(u)
    peak = float(np.max(logs))
    # margin log(1/(1-u)) covers the number of near-peak terms
    cut = peak + math.log(tol) - math.log(1.0 / (1.0 - u) + 8.0)
    above = np.nonzero(logs >= cut)[0]
    n_eff = int(above[-1]) + 1 if len(above) else 1
    with np.errstate(under="ignore"):
        cu = c[:n_eff] * u ** np.arange(n_eff, dtype=float)
    if p == 2.0:
        return float(np.sum(cu * cu))
    M = 1 << max(6, int(math.ceil(math.log2(1.3 * n_eff + 8))))
    vals = np.fft.fft(cu, n=M)
    return float(np.mean(np.abs(vals) ** p))


def kernel_lp_norm(K: KernelSeries, nu: RadialWeight, p: float, N: int, z, *,
                   rel_tol: float = 1e-9, pts: int = 12) -> float:
    """int over the disc of |(1 - conj(z) zeta)^N K_z(zeta)|^p nu dA.

    Radial-by-angular factorisation; rotation invariance of nu reduces z to
    its modulus.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    x = abs(complex(z))
    if x > K.cert.radius_budget:
        raise TruncationError(
            f"|z|={x:.6g} beyond certificate budget {K.cert.radius_budget:.6g}; "
            "rebuild the series with a larger budget")
    c = modified_coeffs(K, N)
    with np.errstate(divide="ignore"):
        log_abs_c = np.log(np.abs(c))
    depth = int(min(40, max(12, math.ceil(-math.log2(max(1e-12, 1.0 - x))) + 6)))
    rule = radial_rule(depth, pts)
    r = rule.nodes
    nu_vals = np.asarray(nu(r), dtype=float)
    means = np.empty_like(r)
    for i, ri in enumerate(r):
        means[i] = _angular_mean_pow(c, log_abs_c, x * ri, p, rel_tol)
    return float(2.0 * np.sum(rule.weights * r * nu_vals * means))


def kernel_norm_bound(w: RadialWeight, nu: RadialWeight, p: float, N: int, z, *,
                      pts: int = 16) -> float:
    """int_0^|z| tail(nu)(t) / (tail(w)(t)^p (1-t)^(p(1-N))) dt + 1.

    The closed-form comparison quantity for the factored-kernel norms.
    """
    x = abs(complex(z))
    if x == 0.0:
        return 1.0
    depth = int(min(46, max(8, math.ceil(-math.log2(1.0 - x)) + 2)))
    edges = [e for e in (1.0 - 2.0 ** (-np.arange(depth + 1, dtype=float))) if e < x]
    edges.append(x)
    xg, wg = _leggauss(pts)
    total = 0.0
    expo = p * (1.0 - N)
    for a, b_ in zip(edges[:-1], edges[1:]):
        t = 0.5 * (b_ - a) * xg + 0.5 * (a + b_)
        wq = 0.5 * (b_ - a) * wg
        log_vals = (np.log(np.asarray(nu.tail(t), dtype=float))
                    - p * np.asarray(w.log_tail(t), dtype=float)
                    - expo * np.log1p(-t))
        total += float(np.sum(wq * np.exp(log_vals)))
    return total + 1.0


# ---------------------------------------------------------------------------
# Rearranged factored series (closed-form coefficient identities)
# ---------------------------------------------------------------------------

def _gm_vec(w: RadialWeight, factors, xs: np.ndarray) -> np.ndarray:
    """Vectorised generalized moments int r^x prod (1-r^y)^n w(r) dr."""
    shifts = {0: 1.0}
    for n_j, y_j in factors:
        for _ in range(int(n_j)):
            new: dict[int, float] = {}
            for s, cf in shifts.items():
                new[s] = new.get(s, 0.0) + cf
                new[s + int(y_j)] = new.get(s + int(y_j), 0.0) - cf
            shifts = new
    out = np.zeros_like(np.asarray(xs, dtype=float))
    for s, cf in shifts.items():
        out = out + cf * w.moment(np.asarray(xs, dtype=float) + s)
    return out


def factored_series_residual(K: KernelSeries, z, zeta, N: int, *,
                             tol: float = 1e-12) -> float:
    """|rearranged series - 2 (1-u)^N K(u)| for N in {1, 2}.

    The rearranged sides express the factored kernel through generalized
    moments; agreement validates both the moment machinery and the series.
    """
    if N not in (1, 2):
        raise ValueError("the rearranged expansions are implemented for N in {1, 2}")
    w = K.weight
    u = np.conj(complex(z)) * complex(zeta)
    n_star = K.truncation_index(abs(u), tol)
    lhs = 2.0 * (1.0 - u) ** N * complex(_polyval(u, K.coeffs[:n_star + 1]))

    odd = w.odd_moments(n_star + 2)

    if N == 1:
        n = np.arange(1, n_star + 1)
        coeff = np.empty(n_star + 1)
        coeff[0] = 1.0 / odd[0]
        gm12 = _gm_vec(w, [(1, 2)], 2.0 * n - 1.0)
        coeff[1:] = gm12 / (odd[n] * odd[n - 1])
        rhs = complex(_polyval(u, coeff))
        return abs(rhs - lhs)

    # N == 2
    gm12_1 = float(_gm_vec(w, [(1, 2)], np.array([1.0]))[0])
    a2 = (1.0 - u) / odd[0] + gm12_1 / (odd[1] * odd[0]) * u
    n = np.arange(2, n_star + 1)
    x = 2.0 * n - 3.0
    gm22 = _gm_vec(w, [(2, 2)], x)
    gm12 = _gm_vec(w, [(1, 2)], x)
    gm14 = _gm_vec(w, [(1, 4)], x)
    coeff_i = np.zeros(n_star + 1)
    coeff_ii = np.zeros(n_star + 1)
    coeff_i[2:] = gm22 / (odd[n] * odd[n - 1])
    coeff_ii[2:] = gm12 * gm14 / (odd[n] * odd[n - 1] * odd[n - 2])
    rhs = a2 - complex(_polyval(u, coeff_i)) + complex(_polyval(u, coeff_ii))
    return abs(rhs - lhs)


# ---------------------------------------------------------------------------
# Log-size check of the shifted-weight kernel in its own first-power norm
# ---------------------------------------------------------------------------

_SHIFTED_CACHE: dict = {}


def log_kernel_ratio(w: RadialWeight, n: int, z, *, rel_tol: float = 1e-7) -> float:
    """First-power self-norm of the shifted-weight kernel divided by
    log(e / (1-|z|)); bounded bands of this ratio witness the logarithmic
    growth of that norm."""
    x = abs(complex(z))
    k_eff = max(4, int(math.ceil(-math.log2(max(1e-15, 1.0 - x)))))
    key = (w.name, int(n), k_eff)
    entry = _SHIFTED_CACHE.get(key)
    if entry is None:
        wn = derived_weight(w, "power_shift", beta=float(n))
        budget = 1.0 - 2.0 ** (-(k_eff + 2))
        entry = (wn, kernel_series(wn, radius_budget=budget, rel_tol=1e-8))
        _SHIFTED_CACHE[key] = entry
    wn, K = entry
    norm = kernel_lp_norm(K, wn, 1.0, 0, x, rel_tol=rel_tol)
    return norm / math.log(math.e / (1.0 - x))
