"""Weight-class verdicts on finite grids.

Three tail/moment growth classes are tested, each by its defining ratio on a
dyadic grid r_k = 1 - 2^-k (or a geometric x-grid):

* upper doubling:   tail(r) <= C tail((1+r)/2)          (bounded ratio)
* reverse doubling: tail(r) >= C tail(1 - (1-r)/K), C>1  (tail really shrinks)
* moment ratio:     moment(x) >= C moment(Kx), C>1       (same, via moments)

The two-sided class is the conjunction of upper and reverse doubling.

Numerical grids cannot prove asymptotic membership, so verdicts are
tri-state: "yes" is a bounded ratio with stable trend, "no" a ratio that
diverges monotonically beyond a divergence factor (or, for the lower-bound
classes, an infimum pinned at 1), anything else "inconclusive".  All ratios
are formed in the log domain so that tails far below float range (e.g. for
exp(-c/(1-r))) still classify.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, TruncationError
from .quadrature import radial_rule
from .weights import RadialWeight

__all__ = ["GridSpec", "ClassReport", "classify", "doubling_equivalents",
           "coef_sum", "tail_integral"]

YES, NO, MAYBE = "yes", "no", "inconclusive"


@dataclass(frozen=True)
class GridSpec:
    """Grids for the classifier: dyadic depth in r, powers of two in x."""

    k_max: int = 14
    x_pow_max: int = 12
    k_list: tuple[int, ...] = (2, 4, 8, 16)

    def __post_init__(self):
        if self.k_max < 6:
            raise ConfigError("classification needs k_max >= 6")

    def r_grid(self) -> np.ndarray:
        return 1.0 - 2.0 ** (-np.arange(1, self.k_max + 1, dtype=float))

    def x_grid(self) -> np.ndarray:
        return 2.0 ** np.arange(0, self.x_pow_max + 1, dtype=float)


@dataclass
class ClassReport:
    """Tri-state verdicts with the empirical constants that back them."""

    weight_name: str
    in_upper_doubling: str
    in_reverse_doubling: str
    in_moment_ratio: str
    in_two_sided: str
    constants: dict
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        def clean(v):
            if isinstance(v, float):
                return v if math.isfinite(v) else None
            if isinstance(v, np.ndarray):
                return [clean(float(x)) for x in v]
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            return v

        return json.dumps({
            "weight": self.weight_name,
            "verdicts": {
                "upper_doubling": self.in_upper_doubling,
                "reverse_doubling": self.in_reverse_doubling,
                "moment_ratio": self.in_moment_ratio,
                "two_sided": self.in_two_sided,
            },
            "constants": clean(self.constants),
            "diagnostics": clean(self.diagnostics),
        }, indent=2, sort_keys=True)


def _slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of y against x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    good = np.isfinite(x) & np.isfinite(y)
    if good.sum() < 2:
        return math.nan
    x, y = x[good], y[good]
    xm, ym = x.mean(), y.mean()
    denom = np.sum((x - xm) ** 2)
    return float(np.sum((x - xm) * (y - ym)) / denom) if denom > 0 else math.nan


def _tri_conjunction(a: str, b: str) -> str:
    if a == NO or b == NO:
        return NO
    if a == YES and b == YES:
        return YES
    return MAYBE


def _upper_verdict(log_ratio, log_one_minus_r, divergence_factor, slope_tol):
    """Verdict for a quantity that must stay bounded above."""
    finite = np.isfinite(log_ratio)
    if not finite.all():
        return NO, math.inf, math.nan
    peak = float(np.max(log_ratio))
    drift = _slope(log_one_minus_r, log_ratio)
    tail_half = log_ratio[len(log_ratio) // 2:]
    increasing = len(tail_half) >= 3 and bool(
        np.all(np.diff(tail_half) > 0))
    if peak > math.log(divergence_factor) and increasing:
        return NO, math.exp(min(peak, 700.0)), drift
    if peak <= math.log(divergence_factor) and abs(drift) <= slope_tol:
        return YES, math.exp(peak), drift
    return MAYBE, math.exp(min(peak, 700.0)), drift


def _lower_verdict(log_ratio, log_one_minus_r, slope_tol,
                   yes_margin=0.05, no_margin=0.005):
    """Verdict for a quantity that must stay >= C > 1 (log >= log C > 0)."""
    worst = float(np.min(log_ratio))
    drift = _slope(log_one_minus_r, log_ratio)
    # declining toward 1 means the bound is eroding with depth
    declining = drift > slope_tol
    if worst >= math.log1p(yes_margin) and not declining:
        return YES, math.exp(worst), drift
    if worst <= math.log1p(no_margin):
        return NO, math.exp(worst), drift
    return MAYBE, math.exp(worst), drift


def classify(w: RadialWeight, grid: GridSpec | None = None, *,
             divergence_factor: float = 1e3, slope_tol: float = 0.1) -> ClassReport:
    """Grid-backed tri-state classification of a radial weight."""
    grid = grid or GridSpec()
    r = grid.r_grid()
    log1mr = np.log1p(-r)
    lt = np.asarray(w.log_tail(r), dtype=float)

    # upper doubling: tail(r) / tail((1+r)/2)
    mid = 0.5 * (1.0 + r)
    g_hat = lt - np.asarray(w.log_tail(mid), dtype=float)
    v_hat, c_hat, drift_hat = _upper_verdict(g_hat, log1mr, divergence_factor, slope_tol)

    # reverse doubling: tail(r) / tail(1 - (1-r)/K), scanned over K
    best = (NO, 1.0, math.nan, 0)
    rev_table = {}
    for K in grid.k_list:
        deeper = 1.0 - (1.0 - r) / K
        h = lt - np.asarray(w.log_tail(deeper), dtype=float)
        verdict, c, drift = _lower_verdict(h, log1mr, slope_tol)
        rev_table[K] = {"verdict": verdict, "C": c, "drift": drift,
                        "log_ratio": h.tolist()}
        rank = {YES: 2, MAYBE: 1, NO: 0}
        if (rank[verdict], c) > (rank[best[0]], best[1]):
            best = (verdict, c, drift, K)
    v_check = best[0] if best[0] != NO or all(
        rev_table[K]["verdict"] == NO for K in grid.k_list) else MAYBE
    c_check, k_check = best[1], best[3]

    # moment ratio: moment(x) / moment(Kx) on a geometric x-grid
    x = grid.x_grid()
    logx = np.log(x)
    lm = np.asarray(w.log_moment(x), dtype=float)
    best_m = (NO, 1.0, math.nan, 0)
    mom_table = {}
    for K in grid.k_list:
        lmk = np.asarray(w.log_moment(K * x), dtype=float)
        h = lm - lmk
        verdict, c, drift = _lower_verdict(h, -logx, slope_tol)
        mom_table[K] = {"verdict": verdict, "C": c, "drift": drift,
                        "log_ratio": h.tolist()}
        rank = {YES: 2, MAYBE: 1, NO: 0}
        if (rank[verdict], c) > (rank[best_m[0]], best_m[1]):
            best_m = (verdict, c, drift, K)
    v_mom = best_m[0] if best_m[0] != NO or all(
        mom_table[K]["verdict"] == NO for K in grid.k_list) else MAYBE
    c_mom, k_mom = best_m[1], best_m[3]

    beta_hat = _slope(log1mr, lt)
    eta_hat = -_slope(logx, lm)
    alpha0_hat = _min_local_slope(log1mr, lt)

    return ClassReport(
        weight_name=w.name,
        in_upper_doubling=v_hat,
        in_reverse_doubling=v_check,
        in_moment_ratio=v_mom,
        in_two_sided=_tri_conjunction(v_hat, v_check),
        constants={
            "C_hat": c_hat, "beta": beta_hat, "lambda": math.nan,
            "eta": eta_hat, "C_check": c_check, "K_check": k_check,
            "C_M": c_mom, "K_M": k_mom, "alpha0": alpha0_hat,
            "drift_hat": drift_hat,
        },
        diagnostics={
            "r_grid": r.tolist(), "log_tail": lt.tolist(),
            "upper_log_ratio": g_hat.tolist(),
            "reverse": rev_table, "moments": mom_table,
            "x_grid": x.tolist(),
        })


def _min_local_slope(log1mr, lt) -> float:
    d = np.diff(lt) / np.diff(log1mr)
    d = d[np.isfinite(d)]
    return float(np.min(d)) if len(d) else math.nan


# ---------------------------------------------------------------------------
# The four equivalent characterisations of upper doubling
# ---------------------------------------------------------------------------

def _binom_series_coeffs(power: float, n: int) -> np.ndarray:
    """Coefficients of (1 - w)^(-power) up to degree n."""
    j = np.arange(n + 1, dtype=float)
    from scipy.special import gammaln
    return np.exp(gammaln(j + power) - gammaln(power) - gammaln(j + 1.0))


def doubling_equivalents(w: RadialWeight, grid: GridSpec | None = None, *,
                         divergence_factor: float = 1e3,
                         slope_tol: float = 0.1) -> dict:
    """Evaluate the four equivalent tail/moment growth conditions.

    (i)   the doubling ratio itself;
    (ii)  tail(r) <= C ((1-r)/(1-t))^beta tail(t) for r <= t;
    (iii) int_D w(z)/|1 - conj(zeta) z|^(lam+1) dA ~ tail(zeta)/(1-|zeta|)^lam
          for some lam >= 0;
    (iv)  moment(x) <= C (y/x)^eta moment(y) for x <= y.

    Returns per-condition verdicts, fitted exponents, and a consistency flag;
    disagreement between conditions is reported as "numerical-inconsistency",
    never silently resolved.
    """
    grid = grid or GridSpec()
    r = grid.r_grid()
    log1mr = np.log1p(-r)
    lt = np.asarray(w.log_tail(r), dtype=float)

    # (i)
    g_hat = lt - np.asarray(w.log_tail(0.5 * (1.0 + r)), dtype=float)
    v1, c1, _ = _upper_verdict(g_hat, log1mr, divergence_factor, slope_tol)

    # (ii) power-bounded tail decay
    beta_hat = _slope(log1mr, lt)
    v2, c2 = _pairwise_upper(lt, log1mr, beta_hat, divergence_factor, slope_tol)

    # (iv) power-bounded moment decay
    x = grid.x_grid()
    logx = np.log(x)
    lm = np.asarray(w.log_moment(x), dtype=float)
    eta_hat = -_slope(logx, lm)
    v4, c4 = _pairwise_upper(lm, -logx, eta_hat, divergence_factor, slope_tol)

    # (iii) kernel-type integral vs tail/(1-r)^lam, scanning a small lam set
    k3 = min(grid.k_max, 10)
    zeta = 1.0 - 2.0 ** (-np.arange(1, k3 + 1, dtype=float))
    log1mz = np.log1p(-zeta)
    ltz = np.asarray(w.log_tail(zeta), dtype=float)
    base = min(max(0.5, beta_hat if math.isfinite(beta_hat) else 1.0), 16.0)
    candidates = sorted({round(base + d, 2) for d in (0.5, 1.0, 2.0, 4.0)})
    n_terms = min(60_000, 20 * 2 ** k3 + 256)
    odd = w.odd_moments(n_terms)
    j = np.arange(len(odd), dtype=float)
    v3, lam_best, band3 = NO, math.nan, math.inf
    table3 = {}
    for lam in candidates:
        d = _binom_series_coeffs((lam + 1.0) / 2.0, len(odd) - 1)
        with np.errstate(over="ignore", invalid="ignore"):
            coeff = d * d * 2.0 * odd
            lhs = np.array([np.sum(coeff * z ** (2.0 * j)) for z in zeta])
        if not np.all(np.isfinite(lhs) & (lhs > 0)):
            table3[lam] = {"band_log": math.inf, "drift": math.nan,
                           "comparable": False}
            continue
        h = np.log(lhs) - (ltz - lam * log1mz)
        width = float(np.max(h) - np.min(h))
        drift = _slope(log1mz, h)
        comparable = width <= math.log(divergence_factor) and abs(drift) <= slope_tol
        table3[lam] = {"band_log": width, "drift": drift,
                       "comparable": bool(comparable)}
        if comparable and width < band3:
            v3, lam_best, band3 = YES, lam, width
    if v3 != YES:
        # divergence of the ratio for every lam mirrors the failure of (i)
        v3 = NO if v1 == NO else MAYBE

    verdicts = (v1, v2, v3, v4)
    consistent = len(set(verdicts)) == 1
    return {
        "conditions": {"i": v1, "ii": v2, "iii": v3, "iv": v4},
        "agree": consistent,
        "flag": None if consistent else "numerical-inconsistency",
        "constants": {"C_hat": c1, "beta": beta_hat, "C_beta": c2,
                      "eta": eta_hat, "C_eta": c4, "lambda": lam_best,
                      "lambda_band_log": band3},
        "lambda_table": table3,
    }


def _pairwise_upper(logvals, logscale, expo, divergence_factor, slope_tol):
    """sup over pairs of logvals[k] - logvals[l] - expo*(logscale[k]-logscale[l])."""
    if not math.isfinite(expo):
        return NO, math.inf
    diffs = logvals[:, None] - logvals[None, :] - expo * (
        logscale[:, None] - logscale[None, :])
    mask = logscale[:, None] > logscale[None, :]  # earlier (larger 1-r / smaller x)
    sup = float(np.max(np.where(mask, diffs, -np.inf)))
    local = np.diff(logvals) / np.diff(logscale)
    local = local[np.isfinite(local)]
    wander = float(np.max(np.abs(local - expo))) if len(local) else math.inf
    if sup <= math.log(divergence_factor) and wander <= max(1.0, abs(expo)):
        return YES, math.exp(sup)
    tail_dev = np.abs(local - expo)
    if len(tail_dev) >= 4 and np.all(np.diff(tail_dev[len(tail_dev) // 2:]) > 0) \
            and sup > math.log(divergence_factor):
        return NO, math.inf
    return (NO if sup > math.log(divergence_factor) else MAYBE), math.exp(min(sup, 700.0))


# ---------------------------------------------------------------------------
# Coefficient sum vs tail integral (the discrete/continuous bridge)
# ---------------------------------------------------------------------------

def coef_sum(w: RadialWeight, p: float, alpha: float, s: float, *,
             rel_tol: float = 1e-10, n_max: int = 1 << 20) -> float:
    """sum_n (n+1)^(alpha-2) / moment(2n+1)^p * s^n, truncated with a
    certified geometric tail."""
    if not 0.0 < s < 1.0:
        raise ValueError("need 0 < s < 1")
    if p <= 0:
        raise ValueError("need p > 0")
    total = 0.0
    n0 = 0
    chunk = 4096
    prev_term = None
    while n0 < n_max:
        hi = min(n_max, n0 + chunk)
        odd = w.odd_moments(hi - 1)[n0:hi]
        n = np.arange(n0, hi, dtype=float)
        with np.errstate(over="ignore", under="ignore"):
            terms = (n + 1.0) ** (alpha - 2.0) / odd ** p * s ** n
        if not np.all(np.isfinite(terms)):
            raise TruncationError("terms overflow before certification",
                                  partial=total)
        total += float(np.sum(terms))
        if terms[-1] == 0.0:
            return total  # remaining terms underflow float64: tail negligible
        # certify: trailing term ratios below q < 1 ends the sum
        ratios = terms[1:] / terms[:-1]
        if prev_term is not None and prev_term > 0 and len(terms):
            ratios = np.concatenate([[terms[0] / prev_term], ratios])
        prev_term = terms[-1]
        q = float(np.max(ratios[-min(64, len(ratios)):]))
        if q < 1.0:
            bound = terms[-1] * q / (1.0 - q)
            if bound <= rel_tol * max(abs(total), 1e-300):
                return total
        n0 = hi
        chunk = min(2 * chunk, 1 << 16)
    raise TruncationError(
        f"no geometric tail certificate below n_max={n_max}",
        partial=total, bound=float(terms[-1]))


def tail_integral(w: RadialWeight, p: float, alpha: float, s: float, *,
                  pts: int = 16) -> float:
    """int_0^s dt / (tail(t)^p (1-t)^alpha) + 1."""
    if not 0.0 < s < 1.0:
        raise ValueError("need 0 < s < 1")
    depth = max(8, int(-math.log2(1.0 - s)) + 4)
    edges = [e for e in dyadic_edges_upto(depth) if e < s] + [s]
    total = 0.0
    from .quadrature import _leggauss
    xg, wg = _leggauss(pts)
    for a, b in zip(edges[:-1], edges[1:]):
        t = 0.5 * (b - a) * xg + 0.5 * (a + b)
        wq = 0.5 * (b - a) * wg
        log_tail = np.asarray(w.log_tail(t), dtype=float)
        vals = np.exp(-p * log_tail - alpha * np.log1p(-t))
        total += float(np.sum(wq * vals))
    return total + 1.0


def dyadic_edges_upto(depth: int) -> list[float]:
    return [0.0] + [1.0 - 2.0 ** (-k) for k in range(1, depth + 1)]
