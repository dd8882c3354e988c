"""Projection, V-transform, small Hankel operators and Bloch seminorms.

Radial weights diagonalise over monomials, so the projection and the
V-transform reduce to the angular Fourier moments

    c_n(f) = int_D f(zeta) conj(zeta)^n w dA,
    e_n(f) = int_D f(zeta) zeta^n w dA,

computed once per symbol by FFT on circles times a radial rule.  Everything
downstream is coefficient algebra:

    projection coefficients      a_n = c_n / (2 moment(2n+1)),
    V-transform                  nu(z) sum_n c_n z^n / (2 moment_{w nu}(2n+1)),
    Hankel matrix (orthonormal   M[m, n] = c_{m+n} / (2 sqrt(moment(2m+1)
    monomial basis, exact p = 2)            * moment(2n+1))).

Monte-Carlo lower bounds cover operator norms away from p = 2; they are
labelled as lower bounds everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import AnalyticFunction
from .errors import QuadratureError
from .geometry import HyperbolicLattice
from .quadrature import radial_rule, two_sided_rule
from .weights import RadialWeight, product_weight

__all__ = [
    "FourierMomentProfile", "fourier_moments", "project",
    "v_coeffs", "v_transform", "v_sup_norm",
    "HankelMatrix", "hankel_apply", "hankel_conj_apply", "hankel_matrix",
    "HankelNormReport", "hankel_norm_p2", "hankel_norm_lower_bound",
    "analytic_lp_norm", "BlochReport", "bloch_report", "omega_log_norm",
    "identity_hankel_projection", "identity_pv", "trilinear_residual",
]


# ---------------------------------------------------------------------------
# Fourier moments
# ---------------------------------------------------------------------------

@dataclass
class FourierMomentProfile:
    """Angular Fourier moments of a symbol against a weight."""

    symbol_name: str
    weight: RadialWeight
    n_max: int
    c: np.ndarray   # c_n = int f conj(zeta)^n w dA
    e: np.ndarray   # e_n = int f zeta^n w dA
    method: str = "quad"


def fourier_moments(f, w: RadialWeight, n_max: int, *, rel_tol: float = 1e-10,
                    depth: int = 32, pts: int = 12,
                    max_order: int = 1 << 14) -> FourierMomentProfile:
    """Compute the profile by FFT on circles, doubling the angular order
    until two passes agree."""
    rule = radial_rule(depth, pts)
    r = rule.nodes
    wv = np.asarray(w(r), dtype=float)
    base = rule.weights * r * wv
    M = 1 << max(6, int(math.ceil(math.log2(4.0 * (n_max + 1)))))
    prev = None
    while M <= max_order:
        theta = 2.0 * np.pi * np.arange(M) / M
        vals = np.asarray(f(r[:, None] * np.exp(1j * theta)[None, :]))
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("symbol not finite on the quadrature grid")
        fhat = np.fft.fft(vals, axis=1) / M
        n = np.arange(n_max + 1)
        powers = r[:, None] ** n[None, :]
        c = 2.0 * np.sum(base[:, None] * powers * fhat[:, n], axis=0)
        e = 2.0 * np.sum(base[:, None] * powers * fhat[:, (-n) % M], axis=0)
        if prev is not None:
            scale = 1.0 + float(np.max(np.abs(c)))
            if float(np.max(np.abs(c - prev[0]))) <= rel_tol * scale and \
               float(np.max(np.abs(e - prev[1]))) <= rel_tol * scale:
                return FourierMomentProfile(getattr(f, "name", "symbol"), w,
                                            n_max, c, e)
        prev = (c, e)
        M *= 2
    raise QuadratureError("fourier moments did not stabilise under angular doubling")


def _coeff_profile(f: AnalyticFunction, w: RadialWeight, n_max: int) -> FourierMomentProfile:
    """Exact profile of an analytic symbol: c_n = f_n 2 moment(2n+1), e_n = e_0 delta."""
    odd = w.odd_moments(n_max)
    c = np.zeros(n_max + 1, dtype=complex)
    upto = min(n_max + 1, len(f.coeffs))
    c[:upto] = f.coeffs[:upto] * 2.0 * odd[:upto]
    e = np.zeros(n_max + 1, dtype=complex)
    e[0] = c[0]
    return FourierMomentProfile(f.name, w, n_max, c, e, method="coeffs")


def _profile_for(f, w, n_max, profile, method="auto") -> FourierMomentProfile:
    if profile is not None:
        if profile.n_max < n_max:
            raise ValueError("profile too short for the requested degree")
        return profile
    if method in ("auto", "coeffs") and getattr(f, "analytic", False) \
            and getattr(f, "coeffs", None) is not None:
        return _coeff_profile(f, w, n_max)
    return fourier_moments(f, w, n_max)


# ---------------------------------------------------------------------------
# Projection and V-transform
# ---------------------------------------------------------------------------

def project(f, w: RadialWeight, n_max: int = 128, *, profile=None,
            method: str = "quad") -> AnalyticFunction:
    """Coefficients of the orthogonal projection: a_n = c_n / (2 moment(2n+1)).

    The quadrature route is the default even for analytic symbols, so the
    projection genuinely exercises the integral definition; pass
    method="coeffs" for the exact diagonal shortcut.
    """
    prof = _profile_for(f, w, n_max, profile, method)
    a = prof.c / (2.0 * w.odd_moments(n_max))
    return AnalyticFunction(f"P[{w.name}]({getattr(f, 'name', 'f')})", coeffs=a)


def v_coeffs(f, w: RadialWeight, nu: RadialWeight, n_max: int = 128, *,
             profile=None, method: str = "auto") -> np.ndarray:
    """Taylor coefficients of the analytic factor of the V-transform."""
    prof = _profile_for(f, w, n_max, profile, method)
    wnu = product_weight(w, nu)
    return prof.c / (2.0 * wnu.odd_moments(n_max))


def v_transform(f, w: RadialWeight, nu: RadialWeight, z, n_max: int = 128, *,
                profile=None, method: str = "auto") -> complex:
    """nu(z) * int f conj(kernel of w nu at z) w dA, via coefficients."""
    coeffs = v_coeffs(f, w, nu, n_max, profile=profile, method=method)
    z = complex(z)
    return complex(float(nu(abs(z))) * np.polynomial.polynomial.polyval(z, coeffs))


def v_sup_norm(f, w: RadialWeight, nu: RadialWeight, lattice: HyperbolicLattice,
               n_max: int = 128, *, profile=None, method: str = "auto") -> float:
    """Lattice sup of |V f|; resolution is the lattice's separation/level."""
    coeffs = v_coeffs(f, w, nu, n_max, profile=profile, method=method)
    pts = lattice.points
    vals = np.polynomial.polynomial.polyval(pts, coeffs)
    nu_vals = np.asarray(nu(np.abs(pts)), dtype=float)
    return float(np.max(np.abs(vals) * nu_vals))


# ---------------------------------------------------------------------------
# Small Hankel operators
# ---------------------------------------------------------------------------

def hankel_apply(f, g, w: RadialWeight, z, n_max: int = 96) -> complex:
    """int f(zeta) g(zeta) K_z(zeta) w dA -- the Hankel action at one point."""
    fg = lambda zeta: np.asarray(f(zeta)) * np.asarray(g(zeta))
    prof = fourier_moments(fg, w, n_max)
    b = 1.0 / (2.0 * w.odd_moments(n_max))
    zbar = np.conj(complex(z))
    return complex(np.polynomial.polynomial.polyval(zbar, b * prof.e))


def hankel_conj_apply(f, g, w: RadialWeight, z, n_max: int = 96) -> complex:
    """Same with the first symbol conjugated: int conj(f) g K_z w dA."""
    fg = lambda zeta: np.conj(np.asarray(f(zeta))) * np.asarray(g(zeta))
    prof = fourier_moments(fg, w, n_max)
    b = 1.0 / (2.0 * w.odd_moments(n_max))
    zbar = np.conj(complex(z))
    return complex(np.polynomial.polynomial.polyval(zbar, b * prof.e))


@dataclass
class HankelMatrix:
    """Truncated matrix on the orthonormal monomial basis.

    Entry (m, n) couples the n-th monomial to the m-th; entries depend on
    m + n only up to the orthonormalising factors, which is the Hankel
    structure (constant anti-diagonals of the unnormalised part).
    """

    symbol_name: str
    weight_name: str
    dim: int
    entries: np.ndarray
    conjugated_symbol: bool = True

    def to_csv(self, path) -> None:
        import csv
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "n", "re", "im"])
            for m in range(self.dim):
                for n in range(self.dim):
                    v = self.entries[m, n]
                    writer.writerow([m, n, f"{v.real:.17g}", f"{v.imag:.17g}"])


def hankel_matrix(f, w: RadialWeight, d: int, *, conjugated: bool = True,
                  profile=None, method: str = "auto") -> HankelMatrix:
    """Matrix of the Hankel operator with (anti-)symbol f on dimension d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    n_max = 2 * d - 2
    prof = _profile_for(f, w, n_max, profile, method)
    odd = w.odd_moments(d - 1)
    scale = 2.0 * np.sqrt(odd[:, None] * odd[None, :])
    m = np.arange(d)
    data = prof.c if conjugated else np.conj(prof.e)
    entries = data[m[:, None] + m[None, :]] / scale
    return HankelMatrix(getattr(f, "name", "symbol"), w.name, d, entries, conjugated)


@dataclass
class HankelNormReport:
    dim: int
    value: float
    value_half: float

    @property
    def stabilisation(self) -> float:
        return abs(self.value - self.value_half) / max(self.value, 1e-300)


def hankel_norm_p2(f, w: RadialWeight, d: int, *, conjugated: bool = True,
                   profile=None, method: str = "auto") -> HankelNormReport:
    """Largest singular value of the truncated matrix, with the value at d/2
    to expose truncation convergence."""
    M = hankel_matrix(f, w, d, conjugated=conjugated, profile=profile,
                      method=method)
    try:
        sv = np.linalg.svd(M.entries, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise QuadratureError(f"SVD failed on the {d}x{d} Hankel matrix: {exc}")
    half = max(1, d // 2)
    M2 = M.entries[:half, :half]
    sv_half = np.linalg.svd(M2, compute_uv=False)
    return HankelNormReport(d, float(sv[0]), float(sv_half[0]))


def analytic_lp_norm(coeffs: np.ndarray, w: RadialWeight, p: float, *,
                     rel_tol: float = 1e-9, depth: int = 28, pts: int = 10) -> float:
    """||sum c_k z^k||_{L^p_w} by radial rule x FFT circle sampling."""
    coeffs = np.asarray(coeffs, dtype=complex)
    rule = two_sided_rule(depth, 1, 30, pts)
    r = rule.nodes
    base = rule.weights * r * np.asarray(w(r), dtype=float)
    M = 1 << max(5, int(math.ceil(math.log2(3.0 * len(coeffs)))))
    prev = None
    while True:
        powers = r[:, None] ** np.arange(len(coeffs))[None, :]
        vals = np.fft.fft(powers * coeffs[None, :], n=M, axis=1)
        means = np.mean(np.abs(vals) ** p, axis=1)
        out = (2.0 * float(np.sum(base * means))) ** (1.0 / p)
        if prev is not None and abs(out - prev) <= rel_tol * max(out, 1e-300):
            return out
        if M >= (1 << 16):
            return out
        prev = out
        M *= 2


def hankel_norm_lower_bound(f, w: RadialWeight, p: float, trials: int, *,
                            seed: int = 0, degree: int = 32, n_max: int = 96,
                            profile=None, method: str = "auto") -> float:
    """Monte-Carlo lower bound for the conjugate-symbol Hankel operator norm
    away from p = 2: max over trial polynomials of the norm ratio.

    Valid as a lower bound up to quadrature error; 0 when trials == 0.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    if trials <= 0:
        return 0.0
    prof = _profile_for(f, w, n_max + degree, profile, method)
    b = 1.0 / (2.0 * w.odd_moments(n_max))
    rng = np.random.default_rng(seed)
    best = 0.0
    gs = [np.array([1.0 + 0.0j])]
    for _ in range(max(0, trials - 1)):
        deg = int(rng.integers(1, degree + 1))
        g = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        gs.append(g)
    for g in gs:
        # action on coefficients: out_m = b_m sum_j g_j conj(c_{m+j})
        conj_c = np.conj(prof.c)
        out = np.array([np.dot(g, conj_c[m:m + len(g)]) for m in range(n_max + 1)])
        out = b * out
        num = analytic_lp_norm(np.conj(out), w, p)
        den = analytic_lp_norm(g, w, p)
        if den > 0:
            best = max(best, num / den)
    return best


# ---------------------------------------------------------------------------
# Bloch data
# ---------------------------------------------------------------------------

@dataclass
class BlochReport:
    """Lattice suprema of the derivative-weighted growth quantities."""

    seminorm: float
    value_at_0: float
    msufk: float                  # sup |f'| (1-|z|)^2 log(e/(1-|z|))
    small_p: float | None
    lattice_separation: float
    lattice_level: int

    @property
    def norm(self) -> float:
        return self.seminorm + self.value_at_0


def bloch_report(f, w: RadialWeight | None = None, p_small: float | None = None,
                 lattice: HyperbolicLattice | None = None) -> BlochReport:
    if lattice is None:
        from .geometry import lattice as make_lattice
        lattice = make_lattice(0.5, 8)
    z = lattice.points
    absz = np.abs(z)
    d = np.abs(np.asarray(f.deriv(z)))
    one_minus_sq = (1.0 - absz) * (1.0 + absz)
    sem = float(np.max(one_minus_sq * d))
    logs = 1.0 - np.log1p(-absz)
    msufk = float(np.max(d * (1.0 - absz) ** 2 * logs))
    small_p = None
    if w is not None and p_small is not None:
        tails = np.asarray(w.tail(absz), dtype=float)
        small_p = float(np.max(
            d * one_minus_sq / (tails * one_minus_sq) ** (1.0 / p_small - 1.0)))
    val0 = float(abs(np.asarray(f(np.zeros(1, dtype=complex)))[0]))
    return BlochReport(sem, val0, msufk, small_p,
                       lattice.separation, lattice.max_level)


def omega_log_norm(f, w: RadialWeight, *, depths=(20, 28, 36)) -> float:
    """int |f| log(e/(1-|z|)) w dA; returns +inf when refinement keeps growing."""
    from .quadrature import DiscQuadrature, integrate_disc

    def g(zeta):
        return np.abs(np.asarray(f(zeta))) * (1.0 - np.log1p(-np.abs(zeta)))

    vals = []
    for depth in depths:
        q = DiscQuadrature.default(depth=depth, tolerance=1e-9)
        vals.append(abs(integrate_disc(g, w, q)))
    if vals[-1] > 1.5 * vals[0] and vals[-1] > vals[-2] > vals[0]:
        return math.inf
    return float(vals[-1])


# ---------------------------------------------------------------------------
# Operator identities
# ---------------------------------------------------------------------------

def identity_hankel_projection(f, g, w: RadialWeight, z, n_max: int = 96) -> float:
    """|Hankel with conj(f) - Hankel with conj(projection of f)| at z.

    Both sides go through independent quadratures.
    """
    lhs = hankel_conj_apply(f, g, w, z, n_max)
    pf = project(f, w, n_max, method="quad")
    rhs = hankel_conj_apply(pf, g, w, z, n_max)
    return abs(lhs - rhs)


def identity_pv(f, w: RadialWeight, nu: RadialWeight, zeta, n_max: int = 96) -> float:
    """|P(V f) - P(f)| at zeta; the V-transform is re-projected by quadrature."""
    coeffs = v_coeffs(f, w, nu, n_max, method="quad")

    def vf(zs):
        zs = np.asarray(zs, dtype=complex)
        return np.asarray(nu(np.abs(zs)), dtype=float) * \
            np.polynomial.polynomial.polyval(zs, coeffs)

    p_vf = project(vf, w, n_max, method="quad")
    p_f = project(f, w, n_max, method="quad")
    zeta = complex(zeta)
    return abs(complex(p_vf(np.array([zeta]))[0]) - complex(p_f(np.array([zeta]))[0]))


def trilinear_residual(f, g, h, w: RadialWeight, n_max: int = 96) -> float:
    """Residual of the pairing identity
    <conj(Hankel_{conj f}(g)), h> = int f conj(g) conj(h) w dA."""
    from .quadrature import DiscQuadrature, integrate_disc

    fg = lambda zeta: np.conj(np.asarray(f(zeta))) * np.asarray(g(zeta))
    prof = fourier_moments(fg, w, n_max)
    hm = min(n_max, (len(h.coeffs) - 1) if h.coeffs is not None else n_max)
    hcoef = np.zeros(n_max + 1, dtype=complex)
    if h.coeffs is not None:
        hcoef[:hm + 1] = h.coeffs[:hm + 1]
    lhs = complex(np.sum(np.conj(prof.e[:n_max + 1] * hcoef)))

    def rhs_fn(zeta):
        return np.asarray(f(zeta)) * np.conj(np.asarray(g(zeta))) * \
            np.conj(np.asarray(h(zeta)))

    rhs = integrate_disc(rhs_fn, w, DiscQuadrature.default(tolerance=1e-11),
                         radial=False)
    return abs(lhs - rhs)
