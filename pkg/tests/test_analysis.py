import math

import numpy as np
import pytest

from interlace import Grid, WaveFunction
from interlace.analysis import (count_law_check, density_profile, find_zeros, interlacing_check,
                                phase_sweep, residual_oracle, state_report, wronskian,
                                wronskian_diagnostics, zero_report)
from interlace.exact import poschl_teller_ground, poschl_teller_wronskian
from interlace.potentials import PoschlTeller, SquareWell
from interlace.wavefunction import Raw, SymmetryAdapted, fix_phase


def pt_state(kappa=2.0, n=8001, L=15.0):
    g = Grid(-L, L, n)
    p, d = poschl_teller_ground(kappa, g.x)
    return WaveFunction(g, p, d, -kappa ** 2 / 4, True)


def test_zeros_of_sine():
    x = np.linspace(-4, 4, 801)
    z = find_zeros(x, np.sin(x))
    assert z.zeros == pytest.approx([-math.pi, 0.0, math.pi], abs=1e-9)
    z2 = find_zeros(x, np.sin(x), np.cos(x))
    assert z2.zeros == pytest.approx([-math.pi, 0.0, math.pi], abs=1e-9)


def test_tangential_zero_ignored():
    x = np.linspace(-1, 1, 101)
    assert find_zeros(x, x ** 2).zeros == []


def test_boundary_zeros_flagged():
    x = np.linspace(0, 1, 101)
    z = find_zeros(x, x - 0.005)
    assert z.zeros == [] and z.boundary == pytest.approx([0.005])


def test_pt_ground_zeros():
    rep = zero_report(pt_state())
    assert rep.lambdas == []
    assert rep.mus == pytest.approx([0.0], abs=1e-12)


@pytest.mark.parametrize("lam,mu,ok", [
    ([1.570], [1.050, 2.091], True),
    ([1, 2], [3, 4], False),
    ([], [0.0], True),
    ([0.0], [0.0], False),
])
def test_interlacing(lam, mu, ok):
    assert interlacing_check(lam, mu)[0] is ok


def test_interlacing_violations_listed():
    ok, bad = interlacing_check([1, 2], [3, 4])
    assert not ok and bad


@pytest.mark.parametrize("counts,ok", [((4, 3), True), ((2, 1), True), ((3, 1), False), ((0, 0), True)])
def test_count_law(counts, ok):
    assert count_law_check(*counts) is ok


def test_wronskian_closed_form():
    wf = pt_state()
    W = wronskian(wf)
    np.testing.assert_allclose(W, poschl_teller_wronskian(2.0, wf.x), atol=1e-12)
    d = wronskian_diagnostics(wf, PoschlTeller(2.0))
    assert d.sign == "-" and d.nonvanishing and d.monotone
    assert d.residual <= 1e-5
    assert d.x0 == pytest.approx(0.0, abs=1e-6)


def test_wronskian_of_real_state_is_degenerate():
    g = Grid(-5, 5, 1001)
    wf = WaveFunction(g, np.exp(-g.x ** 2 / 2) + 0j, -g.x * np.exp(-g.x ** 2 / 2) + 0j, 1.0)
    d = wronskian_diagnostics(wf, SquareWell(0, 0, 0, 0, 0))
    assert d.sign == "zero" and not d.nonvanishing


def test_density_of_pt_ground():
    dp = density_profile(pt_state())
    assert dp.n_maxima == 1
    assert dp.maxima[0][0] == pytest.approx(0.0, abs=1e-6)
    assert dp.maxima[0][1] == pytest.approx(2 / math.pi, rel=1e-6)
    assert dp.min_rho > 0


def test_residual_oracle():
    wf = pt_state()
    spec = PoschlTeller(2.0)
    assert residual_oracle(spec, wf, -1.0) <= 1e-6
    assert residual_oracle(spec, wf, -0.9) >= 0.05
    g = Grid(0, 1, 11)
    zero = WaveFunction(g, np.zeros(11), np.zeros(11), 0.0)
    assert residual_oracle(spec, zero, 0.0) == 0.0


def test_phase_sweep_on_pt_ground():
    reps = phase_sweep(pt_state(), 32)
    assert len(reps) == 32
    assert all(r.interlaced and r.count_law for r in reps)


def test_table1_psi3_real_zeros(solve_preset):
    # fitted phase for the highest sinusoidal state
    from interlace.reproduce import fit_phase
    wf = solve_preset("sinusoidal-deep").states[3]
    lam = [0.360, 1.250, 1.894, 2.793]
    mu = [0.896, 1.572, 2.248]
    _, dev, rep = fit_phase(wf, lam, mu)
    assert rep.lambdas == pytest.approx(lam, abs=5e-3)
    assert dev <= 5e-3


def test_sinusoidal_densities_single_maximum(solve_preset):
    for wf in solve_preset("sinusoidal-deep").states:
        assert density_profile(wf).n_maxima == 1


def test_darboux_psi1_two_symmetric_maxima(darboux_family):
    dp = density_profile(darboux_family(2.0, 0.0, 1.7).states[1])
    assert dp.n_maxima == 2
    (x1, r1), (x2, r2) = dp.maxima
    assert x1 == pytest.approx(-x2, abs=1e-6) and r1 == pytest.approx(r2, rel=1e-6)


def test_zero_extraction_stable_under_refinement():
    a = zero_report(fix_phase(pt_state(n=4001).rotated(0.4), Raw(0.0)))
    b = zero_report(fix_phase(pt_state(n=8001).rotated(0.4), Raw(0.0)))
    assert len(a.lambdas) == len(b.lambdas) and len(a.mus) == len(b.mus)
    for u, v in zip(a.lambdas + a.mus, b.lambdas + b.mus):
        assert abs(u - v) <= 1e-6


def test_state_report_fields():
    rep = state_report(fix_phase(pt_state(), SymmetryAdapted()), PoschlTeller(2.0), sweep=4)
    assert rep["n_R"] == 0 and rep["n_I"] == 1
    assert rep["wronskian"]["residual"] <= 1e-5
    assert rep["density"]["nodeless"]
    assert rep["phase_sweep"]["interlaced"] == 4
    assert state_report(pt_state())["wronskian"]["residual"] is None
