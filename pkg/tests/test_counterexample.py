"""The gap-weight construction: exact masses, tails and zero-mass discs."""

import math

import numpy as np
import pytest

from bergnum.counterexample import (build_gap_weight, default_gap_weight,
                                    default_profile_fn, gap_weight_from_json)
from bergnum.errors import ConstructionError


def test_default_profile_satisfies_derivative_hypothesis():
    r = np.linspace(0, 0.999, 500)
    h = 1e-7
    deriv = (default_profile_fn(r + h) - default_profile_fn(r)) / h
    assert np.all(2 * (1 - r ** 2) * deriv > 1.0)


def test_breakpoint_recurrence():
    prof = default_gap_weight()
    # affine profile in the log-coordinate: B_{n+1} = 4 B_n + 8
    assert prof.B[0] == 0.0
    assert np.allclose(prof.B[1:5], [8.0, 40.0, 168.0, 680.0], rtol=1e-12)
    assert float(prof.recurrence_residuals().max()) < 1e-12


def test_masses_exact():
    prof = default_gap_weight()
    assert np.all(prof.masses == 2.0 ** (-np.arange(1, prof.n_pairs + 1)))
    # float view of the first pair reproduces the mass to rounding
    t = prof.t_seq
    a1 = prof.a_seq[0]
    assert a1 * (t[2] - t[1]) == pytest.approx(0.5, rel=1e-12)


def test_tails_exact_at_pair_starts():
    prof = default_gap_weight()
    for n in range(1, 6):
        assert prof.tail_at_index(2 * n) == 2.0 ** (1 - n)
    assert prof.tail_at_index(1) == 1.0


def test_zero_mass_discs():
    prof = default_gap_weight()
    for n in range(1, 6):
        assert prof.gap_disc_mass(n) == 0.0
        assert prof.gap_containment_margin(n) > 0


def test_gap_midpoints_land_in_gaps():
    prof = default_gap_weight()
    mid = prof.r_mid_B
    for n in range(1, prof.n_pairs + 1):
        assert prof.B[2 * n] < mid[n - 1] < prof.B[2 * n + 1]


def test_float_view_weight():
    w = default_gap_weight().weight
    # vanishes on the initial gap, constant on the first support annulus
    assert float(w(np.array([0.3]))[0]) == 0.0
    t2 = default_gap_weight().t_seq[1]
    assert float(w(np.array([(t2 + 1) / 2]))[0]) > 0
    assert w.moment(0.0) == pytest.approx(1.0, abs=1e-15)
    assert w.tail(0.5) == 1.0
    # tail is non-increasing along the representable window
    r = np.linspace(0, 1 - 1e-9, 300)
    tails = w.tail(r)
    assert np.all(np.diff(tails) <= 1e-15)


def test_moments_monotone_and_plateau():
    w = default_gap_weight().weight
    xs = np.array([0.0, 1.0, 10.0, 1e3, 1e6, 1e9])
    ms = w.moment(xs)
    assert np.all(np.diff(ms) < 0)
    # beyond the first support annulus the moments level at the deep mass,
    # with the first-pair correction decaying like 1/x
    assert ms[-1] == pytest.approx(0.5, rel=1e-5)


def test_infeasible_profile_rejected():
    # slope above 1/2 in the log-coordinate: no breakpoint exists
    with pytest.raises(ConstructionError, match="infeasible"):
        build_gap_weight(psi_B=lambda b: 0.6 * np.asarray(b) + 1.0, n_terms=3)


def test_hypothesis_violation_rejected():
    with pytest.raises(ConstructionError, match="violates"):
        build_gap_weight(psi_B=lambda b: 0.2 * np.asarray(b) + 1.0, n_terms=3)


def test_metric_convention_pinned():
    with pytest.raises(ConstructionError, match="kappa"):
        build_gap_weight(kappa=0.5)


def test_from_json(tmp_path):
    import json
    doc = {"psi": {"kind": "affine_log", "slope": 0.4, "intercept": 1.0},
           "n_terms": 6}
    path = tmp_path / "gap.json"
    path.write_text(json.dumps(doc))
    prof = gap_weight_from_json(path)
    assert prof.n_pairs == 6
    assert prof.gap_disc_mass(1) == 0.0


def test_parse_weight_counterexample_roundtrip():
    from bergnum.weights import parse_weight
    w = parse_weight("counterexample:default")
    assert w.smoothness == "piecewise_constant"
    assert w.support_gaps[0][0] == 0.0
