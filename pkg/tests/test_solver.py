import math

import numpy as np
import pytest

from interlace import Grid, WaveFunction
from interlace.exact import poschl_teller_ground
from interlace.potentials import CubicOscillator, PoschlTeller, SinusoidalWell, SquareWell
from interlace.solver import (MagnitudeOverflowError, find_bound_states_shortrange, integrate,
                              m11_values, transfer_matrix)
from interlace.wavefunction import (PeakPositive, Raw, SymmetryAdapted, ZeroNormError, fix_phase,
                                    normalize, simpson_norm)

FREE = SquareWell(0, 0, 0, 0, 0)


def test_free_plane_wave():
    psi, dpsi = integrate(FREE, 1.0, 0.0, math.pi, 1.0, 1j)
    assert abs(psi - np.exp(1j * math.pi)) < 1e-8
    assert abs(dpsi - 1j * np.exp(1j * math.pi)) < 1e-8


def test_backward_integration():
    psi, dpsi = integrate(FREE, 1.0, math.pi, 0.0, -1.0, -1j)
    assert abs(psi - 1) < 1e-8 and abs(dpsi - 1j) < 1e-8


def test_poschl_teller_ground_state_propagates():
    spec = PoschlTeller(2.0)
    p0, d0 = poschl_teller_ground(2.0, np.array([-8.0, 8.0]))
    psi, dpsi = integrate(spec, -1.0, -8.0, 8.0, p0[0], d0[0])
    assert abs(psi - p0[1]) < 1e-6
    assert abs(dpsi - d0[1]) < 1e-6


def test_linearity():
    spec = PoschlTeller(2.0)
    c = 2.5 - 1.5j
    a = integrate(spec, -0.3, -3, 3, 0.4 + 0.1j, -0.2j)
    b = integrate(spec, -0.3, -3, 3, c * (0.4 + 0.1j), c * (-0.2j))
    for u, v in zip(a, b):
        assert abs(v - c * u) <= 1e-10 * abs(c * u)


def test_rk4_order():
    errs = []
    for h in (0.1, 0.05):
        psi, _ = integrate(FREE, 1.0, 0.0, 10.0, 1.0, 1j, h=h)
        errs.append(abs(psi - np.exp(10j)))
    assert 12 <= errs[0] / errs[1] <= 20


def test_vectorized_energies():
    Es = np.array([0.5, 1.0, 2.0])
    psi, dpsi = integrate(FREE, Es, 0.0, 1.0, 1.0, 0.0)
    np.testing.assert_allclose(psi, np.cos(np.sqrt(Es)), atol=1e-9)


def test_trajectory():
    x, psi, dpsi = integrate(FREE, 1.0, 0.0, 1.0, 1.0, 1j, h=0.01, trajectory=True)
    np.testing.assert_allclose(psi, np.exp(1j * x), atol=1e-9)


def test_overflow_guard():
    with pytest.raises(MagnitudeOverflowError):
        integrate(CubicOscillator(), 0.0, 0.0, 30.0, 1.0, 1.0)


def test_bad_step():
    with pytest.raises(ValueError):
        integrate(FREE, 1.0, 0, 1, 1, 0, h=0)


# --- transfer matrix -----------------------------------------------------------------

@pytest.mark.parametrize("k", [0.3, 1.0, 2.7])
def test_free_transfer_matrix_is_identity(k):
    M = transfer_matrix(FREE, k).as_array()
    np.testing.assert_allclose(M, np.eye(2), atol=1e-9)


def test_real_potential_unimodular():
    M = transfer_matrix(SquareWell(1, 1, -2, 0, 0), 0.8)
    assert abs(M.det - 1) < 1e-8


def test_zero_k_rejected():
    with pytest.raises(ValueError):
        transfer_matrix(FREE, 0.0)


def test_sinusoidal_m11_vanishes_at_bound_energies(solve_preset):
    res = solve_preset("sinusoidal-deep")
    spec = SinusoidalWell(30, 0.49)
    for E in res.energies:
        k = np.sqrt(complex(E - 30))
        at = abs(m11_values(spec, [k])[0])
        assert at < 1e-6
        # a genuine root, not just a small scale: m11 is much larger nearby
        lo, hi = m11_values(spec, [np.sqrt(complex(E - 0.05 - 30)), np.sqrt(complex(E + 0.05 - 30))])
        assert min(abs(lo), abs(hi)) > 1e3 * at


def test_square_well_m11_zero(solve_preset):
    res = solve_preset("square-well-short")
    k = np.sqrt(complex(res.complex_energies[0]))
    if k.imag < 0:
        k = -k
    assert abs(m11_values(SquareWell(3, 4.2762, -1, -0.2, 0.1), [k])[0]) < 1e-6


# --- bound states ------------------------------------------------------------------

def test_sinusoidal_four_states(solve_preset):
    res = solve_preset("sinusoidal-deep")
    assert len(res) == 4
    assert all(0 < E < 30 for E in res.energies)
    assert np.all(np.diff(res.energies) > 0)
    assert res.method == "Transfer"


@pytest.mark.parametrize("name", ["square-well-short", "square-well-mid", "square-well-long"])
def test_square_well_single_state(solve_preset, name):
    assert len(solve_preset(name)) == 1


def test_free_has_no_states():
    res = find_bound_states_shortrange(SquareWell(1, 1, 0, 0, 0))
    assert len(res) == 0


def test_cubic_energies(solve_preset):
    res = solve_preset("cubic")
    assert res.energies[:2] == pytest.approx([1.5946, 5.5470], abs=5e-3)


def test_levai_energies(solve_preset):
    res = solve_preset("levai-complex")
    assert res.energies == pytest.approx([-20.25, -12.25, -6.25, -2.25, -0.25], abs=1e-3)


def test_darboux_energies_by_shooting(solve_preset):
    res = solve_preset("darboux-pt")
    assert res.energies[:5] == pytest.approx([-1, 1, 3, 5, 7], abs=1e-4)


def test_poschl_teller_single_state(solve_preset):
    res = solve_preset("poschl-teller")
    assert len(res) == 1
    assert res.energies[0] == pytest.approx(-1, abs=1e-6)


@pytest.mark.parametrize("name", ["poschl-teller", "sinusoidal-deep", "cubic", "levai-complex",
                                  "square-well-short", "square-well-mid", "square-well-long", "darboux-pt",
                                  "darboux-nonpt"])
def test_accepted_states_are_sound(solve_preset, name):
    res = solve_preset(name)
    for wf, r in zip(res.states, res.residuals):
        assert r <= 1e-4
        assert wf.normalized and abs(simpson_norm(wf) - 1) < 1e-8
        amp = np.abs(wf.psi)
        assert max(amp[0], amp[-1]) <= 1e-6 * amp.max()


def test_transfer_energies_independent_of_step():
    spec = SquareWell(3, 8.9158, -1, -0.2, 0.1)
    a = find_bound_states_shortrange(spec, h=1e-3).energies
    b = find_bound_states_shortrange(spec, h=5e-4).energies
    assert len(a) == len(b) == 1
    assert abs(a[0] - b[0]) < 1e-6


# --- normalization and phase ---------------------------------------------------------

def _pt_wave():
    g = Grid(-12, 12, 4801)
    p, d = poschl_teller_ground(2.0, g.x)
    return WaveFunction(g, p, d, -1.0)


def test_normalize_rescales():
    wf = normalize(_pt_wave())
    twice = WaveFunction(wf.grid, 2 * wf.psi, 2 * wf.dpsi, wf.energy)
    np.testing.assert_allclose(normalize(twice).psi, wf.psi, atol=1e-14)


def test_exact_ground_state_has_unit_norm():
    assert abs(simpson_norm(_pt_wave()) - 1) < 1e-8


def test_zero_norm():
    g = Grid(0, 1, 11)
    with pytest.raises(ZeroNormError):
        normalize(WaveFunction(g, np.zeros(11), np.zeros(11), 0.0))


def test_raw_zero_is_identity():
    wf = _pt_wave()
    np.testing.assert_array_equal(fix_phase(wf, Raw(0.0)).psi, wf.psi)


def test_peak_positive():
    wf = fix_phase(_pt_wave().rotated(1.1), PeakPositive())
    i = np.argmax(np.abs(wf.psi))
    assert abs(wf.psi[i].imag) < 1e-14 and wf.psi[i].real > 0


def test_symmetry_adapted_recovers_parity():
    wf = fix_phase(_pt_wave().rotated(0.7), SymmetryAdapted())
    np.testing.assert_allclose(wf.psi.real, wf.psi.real[::-1], atol=1e-12)
    np.testing.assert_allclose(wf.psi.imag, -wf.psi.imag[::-1], atol=1e-12)


def test_symmetry_adapted_needs_symmetric_grid():
    g = Grid(-1, 2, 31)
    wf = WaveFunction(g, np.exp(-g.x ** 2) + 0j, np.zeros(31), 0.0)
    with pytest.raises(ValueError):
        fix_phase(wf, SymmetryAdapted())
