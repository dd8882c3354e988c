"""Mean oscillation, bounded averages and bounded oscillation over
hyperbolic discs.

For a weight w, an exponent p and a disc radius r the local quantities at z
are the weighted mean over Delta(z, r), the p-mean oscillation around it and
the plain p-mean; suprema over a hyperbolic lattice give the global norms.
Discs of zero weighted mass (a real phenomenon for gap weights) raise a
DegenerateDiscError from the pointwise operations and are recorded, not
fatal, in the lattice sweeps.

Suprema are lattice suprema with the resolution reported; nothing is
extrapolated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import DEFAULT_KAPPA
from .errors import DegenerateDiscError
from .geometry import HyperbolicLattice, hyperbolic_disc
from .quadrature import region_nodes
from .weights import RadialWeight

__all__ = ["OscillationReport", "disc_mean", "mo", "mo_refinement",
           "oscillation_report", "bmo_norm", "ba_norm", "bo_norm",
           "DecompositionResult", "decompose", "r_independence"]


def _disc_data(f, w, disc, *, angular_order=24, radial_levels=4, radial_pts=6,
               graded_toward_origin=False):
    zeta, jac = region_nodes(complex(disc.euclid_center), float(disc.euclid_radius),
                             radial_levels=radial_levels, radial_pts=radial_pts,
                             angular_order=angular_order,
                             graded_toward_origin=graded_toward_origin)
    wv = np.asarray(w(np.abs(zeta)), dtype=float)
    mass = float(np.sum(jac * wv))
    fv = np.asarray(f(zeta)) if f is not None else None
    return zeta, jac * wv, mass, fv


def _batch_disc_means(f, w, centers, r: float, kappa: float, *,
                      angular_order=16, radial_levels=3, radial_pts=5):
    """Weighted disc means at many centres in one vectorised sweep.

    Uses one unit-disc node pattern scaled into each Euclidean image; the
    Jacobian scales with the squared Euclidean radius.
    """
    centers = np.atleast_1d(np.asarray(centers, dtype=complex))
    discs = [hyperbolic_disc(z, r, kappa) for z in centers]
    c = np.array([d.euclid_center for d in discs], dtype=complex)
    R = np.array([d.euclid_radius for d in discs], dtype=float)
    unit, jac_unit = region_nodes(0.0 + 0.0j, 1.0, radial_levels=radial_levels,
                                  radial_pts=radial_pts,
                                  angular_order=angular_order)
    Z = c[:, None] + R[:, None] * unit[None, :]
    jac = (R ** 2)[:, None] * jac_unit[None, :]
    WV = np.asarray(w(np.abs(Z)), dtype=float)
    FV = np.asarray(f(Z))
    mjac = jac * WV
    mass = np.sum(mjac, axis=1)
    if np.any(mass <= 0.0):
        bad = int(np.argmax(mass <= 0.0))
        raise DegenerateDiscError(complex(centers[bad]), r)
    means = np.sum(mjac * FV, axis=1) / mass
    return means, mass


def disc_mean(f, w: RadialWeight, disc, *, angular_order=32, radial_levels=5,
              radial_pts=8) -> complex:
    """Weighted mean of f over the hyperbolic disc; errors on zero mass."""
    _, mjac, mass, fv = _disc_data(f, w, disc, angular_order=angular_order,
                                   radial_levels=radial_levels,
                                   radial_pts=radial_pts)
    if mass <= 0.0:
        raise DegenerateDiscError(disc.center, disc.radius_hyp)
    return complex(np.sum(mjac * fv) / mass)


def mo(f, w: RadialWeight, p: float, r: float, z, *, kappa: float = DEFAULT_KAPPA,
       angular_order=32, radial_levels=5, radial_pts=8,
       graded_toward_origin=False) -> float:
    """p-mean oscillation of f around its weighted mean on Delta(z, r)."""
    if p < 1:
        raise ValueError("p >= 1 required")
    disc = hyperbolic_disc(z, r, kappa)
    _, mjac, mass, fv = _disc_data(f, w, disc, angular_order=angular_order,
                                   radial_levels=radial_levels,
                                   radial_pts=radial_pts,
                                   graded_toward_origin=graded_toward_origin)
    if mass <= 0.0:
        raise DegenerateDiscError(disc.center, disc.radius_hyp)
    mean = np.sum(mjac * fv) / mass
    val = float(np.sum(mjac * np.abs(fv - mean) ** p) / mass)
    return val ** (1.0 / p)


def mo_refinement(f, w: RadialWeight, p: float, r: float, z, *,
                  kappa: float = DEFAULT_KAPPA, depths=(3, 12, 48, 192, 500),
                  radial_pts=6, angular_order=32) -> list[float]:
    """mo at successively quadrupled graded-mesh depths toward the origin.

    Integrable oscillation stabilises along the schedule; a p-divergent
    singularity at the centre grows without bound: each refinement multiplies
    the number of dyadic levels resolved at the singularity by four, so the
    p-th power of a log-divergent oscillation at least doubles per step.
    The last depth stops where |f|^p still fits in float64 (levels beyond
    ~500 would overflow the squared integrand for the singular battery
    symbol); four refinements fit inside that window.
    """
    out = []
    for depth in depths:
        out.append(mo(f, w, p, r, z, kappa=kappa, radial_levels=int(depth),
                      radial_pts=radial_pts, angular_order=angular_order,
                      graded_toward_origin=True))
    return out


@dataclass
class OscillationReport:
    """Lattice suprema of the oscillation quantities with their provenance."""

    p: float
    r: float
    lattice_separation: float
    lattice_level: int
    bmo: float
    ba: float
    bo: float | None
    mo_samples: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)
    degenerate_points: list = field(default_factory=list)

    @property
    def consistency_gap(self) -> float:
        """2*ba - bmo: nonnegative by the triangle inequality on means."""
        return 2.0 * self.ba - self.bmo

    def to_csv(self, path) -> None:
        import csv
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re", "im", "mo"])
            for z, m in zip(self.points, self.mo_samples):
                writer.writerow([f"{z.real:.17g}", f"{z.imag:.17g}", f"{m:.17g}"])


def oscillation_report(f, w: RadialWeight, p: float, r: float,
                       lattice: HyperbolicLattice, *, with_bo: bool = False,
                       angular_order=16, radial_levels=3, radial_pts=6
                       ) -> OscillationReport:
    """One pass over the lattice computing MO and the p-mean; optionally the
    oscillation sup for continuous symbols."""
    if p < 1:
        raise ValueError("p >= 1 required")
    kappa = lattice.kappa
    mos, bas, kept = [], [], []
    degenerate = []
    for z in lattice.points:
        disc = hyperbolic_disc(z, r, kappa)
        _, mjac, mass, fv = _disc_data(f, w, disc, angular_order=angular_order,
                                       radial_levels=radial_levels,
                                       radial_pts=radial_pts)
        if mass <= 0.0:
            degenerate.append(complex(z))
            continue
        mean = np.sum(mjac * fv) / mass
        mos.append((float(np.sum(mjac * np.abs(fv - mean) ** p) / mass)) ** (1.0 / p))
        bas.append((float(np.sum(mjac * np.abs(fv) ** p) / mass)) ** (1.0 / p))
        kept.append(complex(z))
    if not kept:
        raise DegenerateDiscError(lattice.points[0], r)
    bo = bo_norm(f, r, lattice) if with_bo else None
    return OscillationReport(
        p=p, r=r, lattice_separation=lattice.separation,
        lattice_level=lattice.max_level,
        bmo=float(np.max(mos)), ba=float(np.max(bas)), bo=bo,
        mo_samples=np.asarray(mos), points=np.asarray(kept, dtype=complex),
        degenerate_points=degenerate)


def bmo_norm(f, w, p, r, lattice, **kw) -> OscillationReport:
    return oscillation_report(f, w, p, r, lattice, **kw)


def ba_norm(f, w, p, r, lattice, **kw) -> float:
    return oscillation_report(f, w, p, r, lattice, **kw).ba


def bo_norm(f, r: float, lattice: HyperbolicLattice, *, angular_order=12,
            radial_levels=2, radial_pts=4) -> float:
    """sup over lattice points of max |f(z) - f(zeta)| over sampled zeta in
    the disc of radius r around z."""
    kappa = lattice.kappa
    worst = 0.0
    for z in lattice.points:
        disc = hyperbolic_disc(z, r, kappa)
        zeta, _ = region_nodes(complex(disc.euclid_center),
                               float(disc.euclid_radius),
                               radial_levels=radial_levels,
                               radial_pts=radial_pts,
                               angular_order=angular_order)
        fz = complex(np.asarray(f(np.asarray([z], dtype=complex)))[0])
        worst = max(worst, float(np.max(np.abs(np.asarray(f(zeta)) - fz))))
    return worst


@dataclass
class DecompositionResult:
    """f = f1 + f2 with f2 the disc-mean field and f1 the residual."""

    f1: Callable
    f2: Callable
    ba_f1: float
    bo_f2: float


def decompose(f, w: RadialWeight, p: float, r: float,
              lattice: HyperbolicLattice, *, angular_order=16,
              radial_levels=3, radial_pts=6,
              norm_lattice: HyperbolicLattice | None = None) -> DecompositionResult:
    """Split f into a bounded-average part and a bounded-oscillation part.

    f2(z) is the weighted disc mean at z (linear in f, so decompositions add);
    f1 = f - f2.  The reported norms are lattice norms of the two parts,
    taken on ``norm_lattice`` (a coarser default: every f1 evaluation nests a
    disc quadrature, so the full lattice would be quadratically expensive).
    """
    kappa = lattice.kappa
    if norm_lattice is None:
        from .geometry import lattice as make_lattice
        norm_lattice = make_lattice(max(1.0, lattice.separation),
                                    min(4, lattice.max_level), kappa)

    def f2(zs):
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        means, _ = _batch_disc_means(f, w, zs.ravel(), r, kappa,
                                     angular_order=angular_order,
                                     radial_levels=radial_levels,
                                     radial_pts=radial_pts)
        return means.reshape(zs.shape)

    def f1(zs):
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        return np.asarray(f(zs)) - f2(zs)

    rep = oscillation_report(f1, w, p, r, norm_lattice,
                             angular_order=angular_order,
                             radial_levels=radial_levels, radial_pts=radial_pts)
    bo2 = bo_norm(f2, r, norm_lattice, angular_order=8, radial_levels=2,
                  radial_pts=3)
    return DecompositionResult(f1=f1, f2=f2, ba_f1=rep.ba, bo_f2=bo2)


def r_independence(f, w: RadialWeight, p: float, r_list,
                   lattice: HyperbolicLattice, *, class_report=None, **kw) -> dict:
    """Table of lattice oscillation norms across radii with the empirical
    radius beyond which consecutive ratios stay within a factor 2.

    Requires a weight without degenerate discs on the lattice: any degenerate
    point aborts with the degenerate-disc error (that is the gap-weight
    phenomenon, under which the norm is not defined at fixed radius).
    """
    if class_report is not None and class_report.in_two_sided != "yes":
        raise DegenerateDiscError(0j, float(r_list[0]))
    values = {}
    for r in r_list:
        rep = oscillation_report(f, w, p, float(r), lattice, **kw)
        if rep.degenerate_points:
            raise DegenerateDiscError(rep.degenerate_points[0], float(r))
        values[float(r)] = rep.bmo
    rs = sorted(values)
    ratios = {}
    for a, b in zip(rs[:-1], rs[1:]):
        denom = values[a] if values[a] != 0 else 1.0
        ratios[(a, b)] = values[b] / denom if values[a] != 0 else 1.0
    r0 = None
    for i, r in enumerate(rs[:-1]):
        tail_pairs = list(zip(rs[i:-1], rs[i + 1:]))
        if all(0.5 <= ratios[pair] <= 2.0 for pair in tail_pairs):
            r0 = r
            break
    return {"values": values, "ratios": ratios, "stable_from": r0}
