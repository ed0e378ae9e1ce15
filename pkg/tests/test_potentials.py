import math

import numpy as np
import pytest

from interlace import Grid
from interlace.potentials import (CubicOscillator, DarbouxOscillator, Levai, PoschlTeller, Sampled,
                                  SinusoidalWell, SquareWell, classify, eval_potential, pt_check,
                                  spec_from_dict, spec_to_dict, zero_total_area, FAMILIES)
from interlace.catalog import PRESETS

SYM = Grid(-10, 10, 4001)


def test_grid_basics():
    g = Grid(-1, 1, 5)
    assert g.h == pytest.approx(0.5)
    np.testing.assert_allclose(g.x, [-1, -0.5, 0, 0.5, 1])
    assert g.is_symmetric()
    assert Grid.from_dict(g.to_dict()) == g
    with pytest.raises(ValueError):
        Grid(1, 0, 10)
    with pytest.raises(ValueError):
        Grid(0, 1, 2)


def test_poschl_teller_at_origin():
    assert eval_potential(PoschlTeller(2.0), 0.0) == pytest.approx(-4 + 0j)


def test_square_well_left_half():
    assert eval_potential(SquareWell(3, 4.2762, -1, -0.2, 0.1), -1.0) == pytest.approx(-1 - 0.2j)


def test_square_well_pieces():
    w = SquareWell(3, 4.2762, -1, -0.2, 0.1)
    assert w(0.0) == pytest.approx(-1 + 0.1j)  # right-continuous step
    assert w(4.0) == pytest.approx(-1 + 0.1j)
    assert w(-3.5) == 0 and w(4.3) == 0
    x = np.linspace(-10, 20, 3001)
    vi = w(x).imag
    assert np.all(vi[(x < -3) | (x >= 4.2762)] == 0)


def test_cubic_is_pt():
    x = np.linspace(0, 3, 31)
    v = CubicOscillator()
    np.testing.assert_allclose(v(-x), np.conj(v(x)), atol=1e-12)


@pytest.mark.parametrize("spec,kind,x0", [
    (PoschlTeller(2.0), "ContinuousClass", 0.0),
    (SinusoidalWell(30, 0.49), "ShortRangeClass", math.pi / 2),
    (CubicOscillator(), "ContinuousClass", 0.0),
])
def test_classify(spec, kind, x0):
    lab = classify(spec, SYM)
    assert lab.kind == kind
    assert lab.x0 == pytest.approx(x0, abs=1e-8)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_catalog_members_are_classified(name):
    assert classify(PRESETS[name], SYM).kind != "Neither"


def test_classify_neither():
    # two sign changes of the imaginary part
    g = Grid(-5, 5, 1001)
    s = Sampled(g, g.x ** 2 + 1j * (g.x ** 2 - 1))
    assert classify(s, g).kind == "Neither"


@pytest.mark.parametrize("spec,expected", [
    (CubicOscillator(), True),
    (Levai(-7 + 1j, -3 - 1j, 0.1, 1.0), False),
    (DarbouxOscillator(2, 0, 1.7), True),
    (DarbouxOscillator(1.2, 1, 0.02), False),
    (PoschlTeller(2.0), True),
])
def test_pt_check(spec, expected):
    assert pt_check(spec, SYM) is expected


def test_pt_check_needs_symmetric_grid():
    with pytest.raises(ValueError):
        pt_check(CubicOscillator(), Grid(-1, 2, 11))


@pytest.mark.parametrize("spec,tol", [
    (PoschlTeller(2.0), 1e-10),
    (DarbouxOscillator(1.2, 1, 0.02), 1e-8),
    (DarbouxOscillator(2, 0, 1.7), 1e-8),
    (SinusoidalWell(30, 0.49), 1e-10),
])
def test_zero_total_area(spec, tol):
    res = zero_total_area(spec, Grid(-20, 20, 40001))
    assert res.converged
    assert abs(res.value) <= tol


def test_square_well_area_is_exact():
    res = zero_total_area(SquareWell(3, 5, -1, -0.2, 0.1), SYM)
    assert res.value == pytest.approx(-0.2 * 3 + 0.1 * 5, abs=1e-15)


def test_cubic_area_flagged():
    assert not zero_total_area(CubicOscillator(), SYM).converged


def test_sampled_domain():
    g = Grid(0, 1, 11)
    s = Sampled(g, g.x + 0j)
    assert s(0.55) == pytest.approx(0.55)
    with pytest.raises(ValueError):
        s(1.5)


def test_levai_hyperbolics_match_complex_evaluation():
    lv = Levai(-7 + 1j, -3 - 1j, 0.1, 1.0)
    x = np.linspace(-3, 3, 13)
    z = lv.kappa * x + 1j * lv.eps
    a = (lv.nu ** 2 + lv.mu ** 2) / 2 - 0.25
    b = (lv.nu ** 2 - lv.mu ** 2) / 2
    ref = -lv.kappa ** 2 * (a + 1j * b * np.sinh(z)) / np.cosh(z) ** 2
    np.testing.assert_allclose(lv(x), ref, rtol=1e-12)


def test_levai_closed_form_levels():
    lv = Levai(-7 + 1j, -3 - 1j, 0.1, 1.0)
    assert lv.n_levels() == 5
    for n in range(5):
        assert lv.energy(n) == pytest.approx(-(n - 4.5) ** 2)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_spec_json_round_trip(name):
    spec = PRESETS[name]
    again = spec_from_dict(spec_to_dict(spec))
    assert again == spec


def test_spec_from_dict_errors():
    with pytest.raises(ValueError):
        spec_from_dict({"family": "Nope"})
    with pytest.raises(ValueError):
        spec_from_dict({"family": "PoschlTeller", "params": {"kappa": -1}})
    with pytest.raises(ValueError):
        spec_from_dict({"family": "SinusoidalWell", "params": {"W0": 30, "V0": 0.7}})
    with pytest.raises(ValueError):
        spec_from_dict({"family": "SquareWell", "params": {"a": -1, "b": 1}})


def test_six_catalog_families():
    assert len([f for f in FAMILIES if f != "Sampled"]) == 6


def test_evaluation_is_deterministic():
    x = np.linspace(-5, 5, 101)
    for spec in PRESETS.values():
        assert np.array_equal(spec(x), spec(x))
