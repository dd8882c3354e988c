"""The comparison harness and the named experiments (cheap configurations)."""

import json
import math

import numpy as np
import pytest

from bergnum.errors import BergnumError
from bergnum.experiments import (ComparisonReport, ExperimentSpec, compare,
                                 list_experiments, persist_bundle,
                                 run_experiment, run_many)


def test_compare_identical_sides():
    grid = [1 - 2.0 ** -k for k in range(1, 10)]
    rep = compare(lambda t: 1 + t, lambda t: 1 + t, grid)
    assert rep.verdict == "comparable"
    assert rep.ratio_min == rep.ratio_max == 1.0
    assert rep.drift_slope == pytest.approx(0.0, abs=1e-14)


def test_compare_detects_decay():
    grid = [1 - 2.0 ** -k for k in range(1, 12)]
    rep = compare(lambda t: 1.0, lambda t: 1.0 - t, grid)
    assert rep.verdict == "lower_only"  # lhs/rhs grows toward the boundary
    rep2 = compare(lambda t: 1.0 - t, lambda t: 1.0, grid)
    assert rep2.verdict == "upper_only"
    assert rep2.drift_slope == pytest.approx(1.0, abs=1e-9)


def test_compare_bounded_oscillation():
    grid = [1 - 2.0 ** -k for k in range(1, 12)]
    rep = compare(lambda t: 2 + math.sin(1 / (1 - t)), lambda t: 1.0, grid)
    assert rep.verdict == "comparable"
    assert rep.band <= 3.0


def test_compare_flags_nonfinite():
    grid = [0.5, 0.75, 0.875]
    rep = compare(lambda t: 1.0 / (t - 0.75), lambda t: 1.0, grid)
    assert rep.verdict == "diverging"
    assert "first_failure" in rep.detail


def test_verdict_soundness_on_stored_sequences():
    grid = [1 - 2.0 ** -k for k in range(1, 10)]
    rep = compare(lambda t: 1 + 0.5 * math.cos(10 * t), lambda t: 1.0, grid,
                  band_limit=100.0)
    if rep.verdict == "comparable":
        assert rep.ratio_max / rep.ratio_min <= 100.0


def test_eleven_experiments_listed():
    names = list_experiments()
    assert len(names) == 11
    for required in ("exp_lemmaA", "exp_hl", "exp_kernel_norm", "exp_room",
                     "exp_bloch_v", "exp_hankel_bloch", "exp_hankel_V",
                     "exp_bmo_hankel", "exp_main", "exp_counterexample",
                     "exp_pdependence"):
        assert required in names


def test_unknown_experiment_rejected():
    with pytest.raises(BergnumError):
        run_experiment("exp_nope")


def test_counterexample_experiment():
    bundle = run_experiment("exp_counterexample")
    assert bundle["verdict"] == "pass"
    assert bundle["tables"]["disc_masses"] == [0.0] * 5
    assert bundle["tables"]["classification"]["upper_doubling"] == "yes"
    assert bundle["tables"]["classification"]["reverse_doubling"] == "no"


def test_pdependence_experiment():
    bundle = run_experiment("exp_pdependence")
    assert bundle["verdict"] == "pass"
    growth = bundle["tables"]["critical_power_growth"]
    assert all(g >= 2.0 for g in growth)


def test_hl_experiment_small():
    spec = ExperimentSpec(name="exp_hl", weights=["std:alpha=0"], depth=8,
                          params={"combos": [(1.0, 0.0)]})
    bundle = run_experiment("exp_hl", spec=spec)
    assert bundle["verdict"] == "pass"
    assert all(r["verdict"] == "comparable" for r in bundle["reports"])


def test_persistence_and_determinism(tmp_path):
    spec = ExperimentSpec(name="exp_hl", weights=["std:alpha=0"], depth=7,
                          params={"combos": [(1.0, 0.0)]})
    b1 = run_experiment("exp_hl", spec=spec)
    b2 = run_experiment("exp_hl", spec=spec)
    s1 = json.dumps(b1, sort_keys=True)
    s2 = json.dumps(b2, sort_keys=True)
    assert s1 == s2  # identical spec => identical report bytes
    out = persist_bundle(b1, tmp_path)
    assert (out / "report.json").exists()
    assert (out / "spec.json").exists()
    rows = (out / "report.csv").read_text().splitlines()
    assert rows[0].startswith("# bergnum report v1")
    reloaded = json.loads((out / "report.json").read_text())
    assert reloaded["verdict"] == "pass"


def test_run_many_work_queue(tmp_path):
    out = run_many(["exp_counterexample", "exp_pdependence", "exp_nope"],
                   jobs=2)
    assert out["exp_counterexample"]["verdict"] == "pass"
    assert out["exp_pdependence"]["verdict"] == "pass"
    assert out["exp_nope"]["verdict"] == "error"


def test_kernel_norm_experiment_shallow():
    spec = ExperimentSpec(name="exp_kernel_norm", weights=["std:alpha=0"],
                          exponents=[2.0], params={"N": [1]}, depth=6)
    bundle = run_experiment("exp_kernel_norm", spec=spec)
    assert bundle["verdict"] == "pass"


def test_cross_experiment_coherence():
    # analytic symbols: operator-norm/Bloch ratios and transform/operator
    # ratios multiply to the transform/Bloch ratio, so the two experiment
    # families agree within the squared band
    spec_hb = ExperimentSpec(name="exp_hankel_bloch", weights=["std:alpha=0"],
                             symbols=["z", "log_inv"], params={"dims": [32]})
    spec_hv = ExperimentSpec(name="exp_hankel_V", weights=["std:alpha=0"],
                             symbols=["z", "log_inv"], params={"dims": [32]})
    hb = run_experiment("exp_hankel_bloch", spec=spec_hb)
    hv = run_experiment("exp_hankel_V", spec=spec_hv)
    for row_b, row_v in zip(hb["tables"]["ratios"], hv["tables"]["ratios"]):
        assert row_b["symbol"] == row_v["symbol"]
        combined = row_b["ratio"] * row_v["ratio"]  # transform / Bloch
        assert 1e-4 <= combined <= 1e4
