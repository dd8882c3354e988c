"""Weight classification and the four equivalent growth conditions."""

import math

import numpy as np
import pytest
from scipy.special import beta as beta_fn

from bergnum.classify import (GridSpec, classify, coef_sum,
                              doubling_equivalents, tail_integral)
from bergnum.counterexample import default_gap_weight
from bergnum.errors import ConfigError
from bergnum.weights import exponential_weight, power_weight, std_weight


def test_grid_spec_minimum_depth():
    with pytest.raises(ConfigError):
        GridSpec(k_max=5)


def test_unit_weight_is_two_sided(one):
    rep = classify(one)
    assert rep.in_upper_doubling == "yes"
    assert rep.in_reverse_doubling == "yes"
    assert rep.in_moment_ratio == "yes"
    assert rep.in_two_sided == "yes"
    assert rep.constants["C_hat"] == pytest.approx(2.0, abs=1e-12)


def test_std_weights_two_sided(std1):
    for w in (std1, std_weight(2.5)):
        rep = classify(w)
        assert rep.in_two_sided == "yes"


def test_exponential_fails_upper_doubling():
    rep = classify(exponential_weight(1.0))
    assert rep.in_upper_doubling == "no"
    assert rep.in_moment_ratio == "yes"
    assert rep.in_two_sided == "no"
    # the doubling ratio blows past the divergence factor early
    ratios = np.asarray(rep.diagnostics["upper_log_ratio"])
    assert math.exp(min(ratios[9], 700)) > 1e3  # at depth k = 10


def test_gap_weight_upper_yes_reverse_no():
    rep = classify(default_gap_weight().weight)
    assert rep.in_upper_doubling == "yes"
    assert rep.in_reverse_doubling == "no"
    assert rep.in_two_sided == "no"
    assert rep.constants["C_check"] == pytest.approx(1.0)


def test_conjunction_semantics(one):
    rep = classify(one)
    # two_sided is the conjunction of the two tail verdicts
    pairs = {("yes", "yes"): "yes", ("yes", "no"): "no",
             ("no", "inconclusive"): "no", ("yes", "inconclusive"): "inconclusive"}
    from bergnum.classify import _tri_conjunction
    for (a, b), out in pairs.items():
        assert _tri_conjunction(a, b) == out
    assert rep.in_two_sided == _tri_conjunction(
        rep.in_upper_doubling, rep.in_reverse_doubling)


def test_report_serializes(one):
    rep = classify(one)
    text = rep.to_json()
    import json
    doc = json.loads(text)
    assert doc["verdicts"]["two_sided"] == "yes"
    assert doc["constants"]["C_hat"] == pytest.approx(2.0)


def test_equivalents_unit(one):
    res = doubling_equivalents(one)
    assert res["conditions"] == {"i": "yes", "ii": "yes", "iii": "yes",
                                 "iv": "yes"}
    assert res["agree"] is True
    assert res["flag"] is None
    assert 0.9 <= res["constants"]["beta"] <= 1.1


def test_equivalents_exponential_all_no():
    res = doubling_equivalents(exponential_weight(1.0))
    assert res["conditions"] == {"i": "no", "ii": "no", "iii": "no", "iv": "no"}
    assert res["agree"] is True


def test_equivalents_square_power_moment_exponent():
    # (1-r)^2: closed moments via the Beta function, exponent near 3
    w = power_weight(2.0)
    assert w.moment(2.0) == pytest.approx(beta_fn(3, 3), rel=1e-13)   # 1/30
    assert w.moment(4.0) == pytest.approx(beta_fn(5, 3), rel=1e-13)   # 1/105
    assert w.moment(2.0) / w.moment(4.0) == pytest.approx(3.5, rel=1e-12)
    res = doubling_equivalents(w, GridSpec(k_max=14, x_pow_max=16))
    eta = res["constants"]["eta"]
    assert 2.5 <= eta <= 3.2
    # the fitted exponent with its empirical constant covers the hand ratio
    c_eta = res["constants"]["C_eta"]
    assert 3.5 <= c_eta * 2.0 ** eta * (1 + 1e-12)


def test_classifier_consistency_battery(one, std1, linear):
    for w in (one, std1, linear):
        res = doubling_equivalents(w)
        assert res["agree"], w.name
        rep = classify(w)
        verdicts = set(res["conditions"].values())
        assert verdicts == {rep.in_upper_doubling}


# ---------------------------------------------------------------------------
# coefficient sum vs tail integral
# ---------------------------------------------------------------------------

def test_coef_sum_closed_form(one):
    assert coef_sum(one, 1, 0, 0.5) == pytest.approx(4 * math.log(2), rel=1e-10)


def test_tail_integral_closed_form(one):
    assert tail_integral(one, 1, 0, 0.5) == pytest.approx(math.log(2) + 1,
                                                          rel=1e-12)


def test_coef_sum_matches_brute_force(linear):
    # brute 1e6-term summation oracle
    n = np.arange(1_000_000, dtype=float)
    om = 1.0 / ((2 * n + 2) * (2 * n + 3))   # odd moments of (1-r)
    s = 0.9
    with np.errstate(under="ignore"):
        brute = float(np.sum((n + 1) ** (1.0 - 2.0) / om ** 2 * s ** n))
    got = coef_sum(linear, 2, 1, 0.9)
    assert got == pytest.approx(brute, rel=1e-10)


def test_sum_integral_ratio_stable(linear):
    # the two sides are comparable; the constant is weight/parameter specific
    # (here ~90) and stays in one band as s moves toward the boundary
    ratios = []
    for k in (4, 6, 8, 10):
        s = 1 - 2.0 ** -k
        ratios.append(coef_sum(linear, 2, 1, s) / tail_integral(linear, 2, 1, s))
    assert max(ratios) / min(ratios) < 1.5
    assert 10 < min(ratios) < 200


def test_coef_sum_validates_inputs(one):
    with pytest.raises(ValueError):
        coef_sum(one, 1, 0, 1.5)
    with pytest.raises(ValueError):
        coef_sum(one, -1, 0, 0.5)
