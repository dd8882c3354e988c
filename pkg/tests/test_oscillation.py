"""Disc means, mean oscillation, the BA+BO split and radius independence."""

import math

import numpy as np
import pytest

from bergnum.analytic import AnalyticFunction, analytic_battery, general_symbol
from bergnum.counterexample import default_gap_weight
from bergnum.errors import DegenerateDiscError
from bergnum.geometry import hyperbolic_disc, lattice
from bergnum.oscillation import (bo_norm, decompose, disc_mean, mo,
                                 mo_refinement, oscillation_report,
                                 r_independence)


@pytest.fixture(scope="module")
def lat():
    return lattice(0.7, 6)


def test_disc_mean_constant(one):
    d = hyperbolic_disc(0.0, 1.0, 0.5)
    c = AnalyticFunction("c", coeffs=[2.5])
    assert disc_mean(c, one, d) == pytest.approx(2.5, abs=1e-12)


def test_disc_mean_odd_symmetry(one):
    d = hyperbolic_disc(0.0, 1.0, 0.5)
    z = AnalyticFunction("z", coeffs=[0, 1])
    assert abs(disc_mean(z, one, d)) < 1e-14


def test_disc_mean_radial_oracle(one):
    d = hyperbolic_disc(0.0, 1.0, 0.5)
    s = d.euclid_radius
    got = disc_mean(general_symbol("abs2"), one, d, angular_order=64,
                    radial_levels=8, radial_pts=10)
    assert complex(got).real == pytest.approx(s * s / 2, rel=1e-10)


def test_disc_mean_degenerate():
    gw = default_gap_weight().weight
    d = hyperbolic_disc(0.5, 0.5, 0.5)
    with pytest.raises(DegenerateDiscError):
        disc_mean(AnalyticFunction("c", coeffs=[1.0]), gw, d)


def test_mo_constant_vanishes(one):
    c = AnalyticFunction("c", coeffs=[3.0])
    assert mo(c, one, 2, 1.0, 0.3 + 0.1j) < 1e-12


def test_mo_real_part_oracle(one):
    # second-moment oscillation of Re z on the central disc is s/2
    d = hyperbolic_disc(0.0, 1.0, 0.5)
    got = mo(general_symbol("re_z"), one, 2, 1.0, 0.0, angular_order=64,
             radial_levels=8, radial_pts=10)
    assert got == pytest.approx(d.euclid_radius / 2, rel=1e-10)


def test_mo_shift_invariance_and_scaling(one, rng):
    f = general_symbol("re_z")
    base = mo(f, one, 2, 1.0, 0.2)

    def shifted(z):
        return f(z) + 4.2

    def scaled(z):
        return -2.5 * f(z)

    assert mo(shifted, one, 2, 1.0, 0.2) == pytest.approx(base, abs=1e-10)
    assert mo(scaled, one, 2, 1.0, 0.2) == pytest.approx(2.5 * base, rel=1e-12)


def test_mo_validates_exponent(one):
    with pytest.raises(ValueError):
        mo(general_symbol("re_z"), one, 0.5, 1.0, 0.0)


def test_report_constant_symbol(one, lat):
    c = AnalyticFunction("c", coeffs=[1.0])
    rep = oscillation_report(c, one, 2, 1.0, lat)
    assert rep.bmo < 1e-12
    assert rep.ba == pytest.approx(1.0, abs=1e-10)
    assert not rep.degenerate_points


def test_bounded_symbol_bmo_bound(one, lat):
    # oscillation around the mean is at most twice the sup
    for name in ("re_z", "abs2"):
        f = general_symbol(name)
        rep = oscillation_report(f, one, 2, 1.0, lat)
        sup = float(np.max(np.abs(f(lat.points))))
        assert rep.bmo <= 2 * sup + 1e-9


def test_hyp_dist_band_stable(one):
    f = general_symbol("hyp_dist")
    vals = []
    for level in (6, 8):
        rep = oscillation_report(f, one, 2, 1.0, lattice(0.7, level))
        vals.append(rep.bmo)
    assert max(vals) / min(vals) < 1.5
    assert all(math.isfinite(v) and v > 0 for v in vals)


def test_bloch_inside_bmo(one, std1, lat):
    # analytic battery symbols: bmo <= C (seminorm + |f(0)|) with one grid C
    from bergnum.transforms import bloch_report
    battery = analytic_battery()
    for w in (one, std1):
        cs = []
        for name in ("z", "z2", "log_inv"):
            f = battery[name]
            rep = oscillation_report(f, w, 2, 1.0, lat)
            br = bloch_report(f, lattice=lat)
            cs.append(rep.bmo / (br.seminorm + br.value_at_0))
        assert max(cs) < 10.0


def test_linf_inside_bmo(one, lat):
    f = general_symbol("re_z")
    rep = oscillation_report(f, one, 2, 1.0, lat)
    assert rep.bmo <= 2 * 1.0


def test_bo_values(one, lat):
    c = AnalyticFunction("c", coeffs=[1.0])
    assert bo_norm(c, 1.0, lat) < 1e-13
    f = general_symbol("hyp_dist")
    v = bo_norm(f, 1.0, lat, angular_order=24, radial_levels=4, radial_pts=6)
    assert v <= 1.0 + 1e-9          # triangle inequality at radius 1
    assert v >= 0.9                 # attained along radial sampling
    g = general_symbol("re_z")
    v1 = bo_norm(g, 1.0, lat)
    v2 = bo_norm(g, 0.5, lat)
    assert v2 <= v1 + 1e-12


def test_decompose_basics(one, lat):
    c = AnalyticFunction("c", coeffs=[0.8])
    dec = decompose(c, one, 2, 1.0, lat)
    # constants decompose as f1 = 0, f2 = c
    z = np.array([0.2 + 0.1j])
    assert abs(dec.f1(z)[0]) < 1e-12
    assert dec.f2(z)[0] == pytest.approx(0.8, abs=1e-12)


def test_decompose_band_and_additivity(one, lat):
    f = AnalyticFunction("p", coeffs=[0.2, 1.0])
    g = AnalyticFunction("q", coeffs=[0.5])
    fg = AnalyticFunction("pq", coeffs=[0.7, 1.0])
    dec_f, dec_g, dec_fg = (decompose(h, one, 2, 1.0, lat) for h in (f, g, fg))
    z = np.array([0.3 + 0.1j, -0.2j])
    assert np.max(np.abs(dec_fg.f2(z) - dec_f.f2(z) - dec_g.f2(z))) < 1e-14
    # the split norms stay within a band of the oscillation norm
    rep = oscillation_report(f, one, 2, 1.0, lat)
    assert dec_f.ba_f1 + dec_f.bo_f2 <= 20 * max(rep.bmo, 1e-12)


def test_r_independence_trivial_and_stable(one, lat):
    c = AnalyticFunction("c", coeffs=[1.0])
    out = r_independence(c, one, 2, [1.0, 2.0], lat)
    assert all(v < 1e-10 for v in out["values"].values())
    f = general_symbol("hyp_dist")
    out2 = r_independence(f, one, 2, [1.0, 2.0, 4.0], lat)
    vals = list(out2["values"].values())
    assert max(vals) / min(vals) < 4.0
    assert out2["stable_from"] is not None


def test_r_independence_aborts_on_gap_weight(lat):
    gw = default_gap_weight().weight
    with pytest.raises(DegenerateDiscError):
        r_independence(general_symbol("re_z"), gw, 2, [1.0], lat)


def test_p_dependence_refinement(one):
    f = general_symbol("invabs:p=2")
    crit = mo_refinement(f, one, 2, 1.0, 0.0)
    sub = mo_refinement(f, one, 1, 1.0, 0.0)
    assert all(b > a for a, b in zip(crit, crit[1:]))
    assert all((b / a) ** 2 >= 2.0 for a, b in zip(crit, crit[1:]))
    assert all(abs(b - a) / a < 0.01 for a, b in zip(sub, sub[1:]))


def test_mo_field_csv_export(tmp_path, one, lat):
    rep = oscillation_report(general_symbol("re_z"), one, 2, 1.0, lat)
    path = tmp_path / "mo.csv"
    rep.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "re,im,mo"
    assert len(lines) == len(rep.points) + 1
