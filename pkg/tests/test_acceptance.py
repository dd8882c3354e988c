"""Acceptance suite: one test per acceptance criterion, at pinned tolerances.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass/fail line per
criterion.  Criterion 7 is split in two: its band and hand-value claims hold,
while its 1% truncation-stabilisation gate is genuinely missed by two battery
combinations (measured 1.046% and 2.006%); that sub-test fails by design
rather than loosening the stated tolerance.
"""

import math
import time

import numpy as np
import pytest

from bergnum.analytic import AnalyticFunction, analytic_battery, general_symbol
from bergnum.classify import GridSpec, classify
from bergnum.counterexample import default_gap_weight
from bergnum.experiments import ExperimentSpec, run_experiment
from bergnum.geometry import lattice
from bergnum.kernels import (eval_kernel, eval_kernel_on,
                             factored_series_residual, kernel_series)
from bergnum.oscillation import mo_refinement
from bergnum.quadrature import DiscQuadrature, integrate_disc
from bergnum.transforms import (bloch_report, hankel_norm_p2,
                                identity_hankel_projection, identity_pv,
                                project, trilinear_residual)
from bergnum.weights import power_weight, std_weight, unit_weight

RNG_SEED = 315


def report(line: str) -> None:
    print(f"\n[acceptance] {line}")


def test_criterion_01_closed_form_kernels():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED)
    worst = 0.0
    for alpha in (0.0, 1.0, 2.5):
        K = kernel_series(std_weight(alpha))
        for _ in range(50):
            z = rng.uniform(0, 0.975) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            m = min(0.95 / max(abs(z), 1e-9), 0.975)
            zeta = rng.uniform(0, m) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            got = eval_kernel(K, z, zeta)
            exact = 1.0 / (1.0 - np.conj(z) * zeta) ** (2.0 + alpha)
            worst = max(worst, abs(got - exact) / abs(exact))
    dt = time.time() - t0
    report(f"criterion 1: closed-form kernels, max rel err {worst:.3e} "
           f"(limit 1e-9), {dt:.1f}s (limit 5s)")
    assert worst <= 1e-9
    assert dt < 5.0


def test_criterion_02_reproducing_property():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED + 1)
    q = DiscQuadrature.default(depth=26, pts=10, angular_order=256,
                               tolerance=1e-12)
    worst = 0.0
    for alpha in (0.0, 1.0, 2.5):
        w = std_weight(alpha)
        K = kernel_series(w)
        for _ in range(10):
            deg = int(rng.integers(0, 10))
            c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
            for _ in range(10):
                z = complex(*rng.uniform(-0.45, 0.45, 2))

                def integrand(zeta, _c=c, _z=z):
                    fz = np.polynomial.polynomial.polyval(zeta, _c)
                    return fz * np.conj(eval_kernel_on(K, _z, zeta))

                got = integrate_disc(integrand, w, q, radial=False)
                expected = np.polynomial.polynomial.polyval(z, c)
                worst = max(worst, abs(got - expected))
    dt = time.time() - t0
    report(f"criterion 2: reproducing property, max abs err {worst:.3e} "
           f"(limit 1e-8), {dt:.1f}s (limit 30s)")
    assert worst <= 1e-8
    assert dt < 30.0


def test_criterion_03_factored_expansions():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED + 2)
    worst = 0.0
    for w in (unit_weight(), power_weight(1.0), std_weight(1.0)):
        K = kernel_series(w)
        for N in (1, 2):
            for _ in range(20):
                z = complex(*rng.uniform(-0.63, 0.63, 2))
                zeta = complex(*rng.uniform(-0.63, 0.63, 2))
                worst = max(worst, factored_series_residual(K, z, zeta, N))
    dt = time.time() - t0
    report(f"criterion 3: factored-series identities, max residual {worst:.3e} "
           f"(limit 1e-8), {dt:.1f}s (limit 10s)")
    assert worst <= 1e-8
    assert dt < 10.0


def test_criterion_04_two_sided_kernel_norms():
    """Band <= 100 and |drift| <= 0.1 on the pinned k <= 12 grid.

    One of the sixteen combos (w = std alpha=1, nu = std alpha=1, p=3, N=2)
    is a log-against-log ratio still in its transient at k = 12: its exact
    closed forms drift at -0.124 there (and pass from depth 14).  The
    criterion is asserted as stated; see the decisions ledger for the
    independent closed-form computation.
    """
    t0 = time.time()
    spec = ExperimentSpec(name="exp_kernel_norm",
                          weights=["std:alpha=0", "std:alpha=1"],
                          exponents=[2.0, 3.0], params={"N": [1, 2]},
                          depth=12, band_limit=100.0, slope_tol=0.1)
    bundle = run_experiment("exp_kernel_norm", spec=spec)
    dt = time.time() - t0
    bands = [r["band"] for r in bundle["reports"]]
    offenders = {r["name"]: r["drift_slope"] for r in bundle["reports"]
                 if abs(r["drift_slope"]) > 0.1 or r["band"] > 100.0}
    report(f"criterion 4: two-sided norm estimate, {len(bands)} combos, "
           f"max band {max(bands):.2f} (limit 100), drift gate "
           + ("met by all" if not offenders else
              "missed by " + ", ".join(f"{k} at {v:+.3f}"
                                       for k, v in offenders.items()))
           + f" (limit 0.1), {dt:.0f}s (limit 300s)")
    assert max(bands) <= 100.0
    assert dt < 300.0
    assert not offenders, (
        f"drift gate missed on the pinned k<=12 grid by {offenders}; "
        "exact transient analysis in the decisions ledger")


def test_criterion_05_classifier_ground_truth():
    t0 = time.time()
    for alpha in (0.0, 1.0):
        rep = classify(std_weight(alpha))
        assert rep.in_two_sided == "yes", f"std alpha={alpha}"
    rep_exp = classify(exponential := __import__(
        "bergnum.weights", fromlist=["exponential_weight"]
    ).exponential_weight(1.0))
    assert rep_exp.in_moment_ratio == "yes"
    assert rep_exp.in_upper_doubling == "no"
    ratio_k10 = math.exp(min(rep_exp.diagnostics["upper_log_ratio"][9], 700.0))
    assert ratio_k10 > 1e3
    rep_gap = classify(default_gap_weight().weight)
    assert rep_gap.in_upper_doubling == "yes"
    assert rep_gap.in_reverse_doubling == "no"
    dt = time.time() - t0
    report(f"criterion 5: classifier ground truth (std in D, exp M+/Dhat-, "
           f"gap Dhat+/Dcheck-), exp tail ratio at k=10 is {ratio_k10:.2e} "
           f"(limit 1e3), {dt:.1f}s (limit 60s)")
    assert dt < 60.0


def test_criterion_06_gap_weight_exactness():
    t0 = time.time()
    prof = default_gap_weight()
    masses = [prof.gap_disc_mass(n) for n in range(1, 6)]
    tails = [prof.tail_at_index(2 * n) for n in range(1, 6)]
    expected = [2.0 ** (1 - n) for n in range(1, 6)]
    dt = time.time() - t0
    report(f"criterion 6: gap-weight exactness, disc masses {masses}, "
           f"tails {tails} == {expected}, {dt:.1f}s (limit 10s)")
    assert masses == [0.0] * 5
    assert tails == expected
    assert dt < 10.0


def _hankel_battery_data():
    battery = analytic_battery()
    lat = lattice(0.4, 10)
    rows = []
    for w in (unit_weight(), std_weight(1.0)):
        for name, f in battery.items():
            r64 = hankel_norm_p2(f, w, 64)
            r32 = hankel_norm_p2(f, w, 32)
            sem = bloch_report(f, lattice=lat).seminorm
            rows.append({
                "weight": w.name, "symbol": name,
                "ratio": r64.value / sem,
                "stab": abs(r64.value - r32.value) / r32.value,
            })
    return rows


def test_criterion_07_hankel_vs_bloch_band_and_hand_value():
    t0 = time.time()
    rows = _hankel_battery_data()
    ratios = [r["ratio"] for r in rows]
    band = max(ratios) / min(ratios)
    hand = hankel_norm_p2(analytic_battery()["z"], unit_weight(), 2).value
    dt = time.time() - t0
    report(f"criterion 7a: operator-norm/Bloch band {band:.2f} (limit 100), "
           f"hand value |{hand:.15f} - sqrt(1/2)| = "
           f"{abs(hand - math.sqrt(0.5)):.2e} (limit 1e-12), {dt:.0f}s "
           f"(limit 120s)")
    assert band <= 100.0
    assert abs(hand - math.sqrt(0.5)) <= 1e-12
    assert dt < 120.0


def test_criterion_07_stabilisation_one_percent():
    """The literal 1% gate from d=32 to d=64.

    The truncated norms are exact linear-algebra quantities here, and two of
    the ten battery combinations converge slower than the stated gate:
    log_inv and lacunary against the unit weight stabilise at 1.046% and
    2.006% (both meet 1% only from d=64 to d=128).  The criterion is asserted
    as written rather than loosened; see the decisions ledger.
    """
    rows = _hankel_battery_data()
    offenders = {f"{r['weight']}/{r['symbol']}": r["stab"]
                 for r in rows if r["stab"] > 0.01}
    line = "criterion 7b: stabilisation d=32->64, " + (
        "all within 1%" if not offenders else
        "exceeded by " + ", ".join(f"{k} at {v:.3%}" for k, v in offenders.items()))
    report(line + " (limit 1%)")
    assert not offenders, (
        f"stabilisation gate missed by {offenders}; exact convergence data "
        "in the decisions ledger")


def test_criterion_08_transform_vs_hankel_band():
    t0 = time.time()
    spec = ExperimentSpec(name="exp_hankel_V",
                          weights=["std:alpha=0", "std:alpha=1"],
                          symbols=["z", "log_inv", "re_z", "hyp_dist",
                                   "radial_log"],
                          band_limit=100.0)
    bundle = run_experiment("exp_hankel_V", spec=spec)
    dt = time.time() - t0
    band = bundle["tables"]["band"]
    report(f"criterion 8: transform-sup vs operator norm at p=2, band "
           f"{band:.2f} (limit 100) incl non-analytic symbols, {dt:.0f}s "
           f"(limit 180s)")
    assert bundle["verdict"] == "pass"
    assert band <= 100.0
    assert dt < 180.0


def test_criterion_09_projection_bound():
    t0 = time.time()
    spec = ExperimentSpec(name="exp_main",
                          weights=["std:alpha=0", "std:alpha=1"],
                          exponents=[1.5, 2.0, 3.0], band_limit=100.0)
    bundle = run_experiment("exp_main", spec=spec)
    dt = time.time() - t0
    sup_ratio = bundle["tables"]["sup_ratio"]
    cs = [row["C"] for row in bundle["tables"]["bounded"]]
    report(f"criterion 9: projection bound, sup bloch(P f)/bmo(f) = "
           f"{sup_ratio:.2f} (limit 100); bounded symbols C = "
           f"{max(cs):.2f}, {dt:.0f}s (limit 300s)")
    assert bundle["verdict"] == "pass"
    assert sup_ratio <= 100.0
    assert max(cs) <= 100.0
    assert dt < 300.0


def test_criterion_10_exponent_separation():
    t0 = time.time()
    one = unit_weight()
    f = general_symbol("invabs:p=2")
    crit = mo_refinement(f, one, 2, 1.0, 0.0)
    sub = mo_refinement(f, one, 1, 1.0, 0.0)
    growth = [(b / a) ** 2 for a, b in zip(crit, crit[1:])]
    stab = [abs(b - a) / a for a, b in zip(sub, sub[1:])]
    dt = time.time() - t0
    report(f"criterion 10: exponent separation, exponent-2 mean growth per "
           f"refinement {['%.2f' % g for g in growth]} (limit >= 2), "
           f"exponent-1 change {max(stab):.2e} (limit 1%), {dt:.1f}s "
           f"(limit 30s)")
    assert all(b > a for a, b in zip(crit, crit[1:]))   # monotone, unbounded trend
    assert all(g >= 2.0 for g in growth)
    assert all(s < 0.01 for s in stab)
    assert dt < 30.0


def test_criterion_11_operator_identities():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED + 3)
    one = unit_weight()
    linear = power_weight(1.0)
    g1 = AnalyticFunction("one_f", coeffs=[1.0])
    gz = AnalyticFunction("z", coeffs=[0, 1])
    residuals = [
        identity_hankel_projection(
            AnalyticFunction("p", coeffs=[0.3, 1.0, -0.5]), g1, one, 0.5),
        identity_hankel_projection(general_symbol("conj_z"), g1, one, 0.5),
        identity_hankel_projection(general_symbol("abs2"), gz, one, 0.5),
        identity_pv(AnalyticFunction("p", coeffs=[0.1, 0.4, 0.2]), one,
                    linear, 0.4),
        identity_pv(g1, one, linear, 0.3),
        identity_pv(general_symbol("conj_z"), one, linear, 0.3),
    ]
    worst_tri = 0.0
    for _ in range(20):
        f = AnalyticFunction("f", coeffs=rng.standard_normal(4)
                             + 1j * rng.standard_normal(4))
        g = AnalyticFunction("g", coeffs=rng.standard_normal(3)
                             + 1j * rng.standard_normal(3))
        h = AnalyticFunction("h", coeffs=rng.standard_normal(3)
                             + 1j * rng.standard_normal(3))
        worst_tri = max(worst_tri, trilinear_residual(f, g, h, one, n_max=24))
    dt = time.time() - t0
    report(f"criterion 11: operator identities, max residual "
           f"{max(residuals):.3e} (limit 1e-8), trilinear {worst_tri:.3e} "
           f"(limit 1e-9), {dt:.0f}s (limit 60s)")
    assert max(residuals) <= 1e-8
    assert worst_tri <= 1e-9
    assert dt < 60.0
