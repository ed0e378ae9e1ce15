"""Acceptance criteria 1-8, one PASS/FAIL line each.

Lines are printed as the criteria run and repeated in the pytest terminal
summary. Run standalone with ``python tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from interlace.analysis import (density_profile, find_zeros, phase_sweep, wronskian,
                                wronskian_diagnostics, zero_report)
from interlace.catalog import PRESETS, solve_spec
from interlace.darboux import build_family
from interlace.potentials import DarbouxOscillator, SquareWell, zero_total_area
from interlace.reproduce import run_table
from interlace.solver import integrate

LINES = {}
TABLE_TOL = 5e-3


class Check:
    """Collects named sub-checks and the wall time of one criterion."""

    def __init__(self, number, budget):
        self.number, self.budget = number, budget
        self.items = []
        self.t0 = time.perf_counter()

    def add(self, ok, what):
        self.items.append((bool(ok), what))

    def finish(self):
        dt = time.perf_counter() - self.t0
        self.add(dt < self.budget, f"runtime {dt:.1f} s < {self.budget:g} s")
        ok = all(o for o, _ in self.items)
        failed = [w for o, w in self.items if not o]
        detail = "; ".join(failed) if failed else "; ".join(w for _, w in self.items)
        line = f"criterion {self.number}: {'PASS' if ok else 'FAIL'}  {detail}"
        LINES[self.number] = line
        print(line)
        assert ok, line


def _rows_ok(outcome):
    return all(r.passed for r in outcome.rows)


def _table_summary(outcome):
    worst = max(r.deviation for r in outcome.rows)
    return f"table {outcome.table}: {len(outcome.rows)} rows, max zero dev {worst:.1e}"


def test_criterion_1_poschl_teller():
    c = Check(1, 5.0)
    kappa = 2.0
    res = solve_spec(PRESETS["poschl-teller"])
    c.add(len(res) == 1, f"{len(res)} bound state")
    E = res.energies[0]
    c.add(abs(E + 1) <= 1e-6, f"|E0 + 1| = {abs(E + 1):.1e}")
    wf = res.states[0]
    x = wf.x
    rho_err = np.max(np.abs(wf.rho - kappa / math.pi / np.cosh(kappa * x)))
    c.add(rho_err <= 1e-6, f"rho error {rho_err:.1e}")
    # exact Wronskian magnitude of the ground state is (kappa^2/2pi) sech^2(kappa x)
    w_err = np.max(np.abs(np.abs(wronskian(wf)) - kappa ** 2 / (2 * math.pi) / np.cosh(kappa * x) ** 2))
    c.add(w_err <= 1e-5, f"|W| vs (k^2/2pi)sech^2(kx) error {w_err:.1e}")
    c.finish()


@pytest.mark.xfail(strict=True, reason="W of the exact ground state is -(k^2/2pi) sech^2(kx), not "
                   "sech(kx): with psi = sqrt(k/pi) sech^(1/2)(kx) e^{i phase}, W = -rho * phase' and "
                   "phase' = (k/2) sech(kx), so the quoted single-power sech form cannot hold")
def test_criterion_1_literal_sech_wronskian():
    kappa = 2.0
    wf = solve_spec(PRESETS["poschl-teller"]).states[0]
    err = np.max(np.abs(np.abs(wronskian(wf)) - kappa ** 2 / (2 * math.pi) / np.cosh(kappa * wf.x)))
    assert err <= 1e-5


def test_criterion_2_sinusoidal_table():
    c = Check(2, 60.0)
    out = run_table("1")
    res = solve_spec(PRESETS["sinusoidal-deep"])
    c.add(len(res) == 4 and all(0 < E < 30 for E in res.energies), f"{len(res)} states in (0, 30)")
    n_l = sum(len(r.lambdas) for r in out.rows)
    n_m = sum(len(r.mus) for r in out.rows)
    # the table holds 1+2+3+4 = 10 lambda values, one fewer than the criterion asks for
    c.add(n_l == 10 and n_m == 10, f"all {n_l} lambda and {n_m} mu values of the table compared "
          "(11 lambda expected, 10 exist)")
    c.add(_rows_ok(out), _table_summary(out))
    c.finish()


def test_criterion_3_cubic():
    c = Check(3, 60.0)
    res = solve_spec(PRESETS["cubic"])
    got = res.energies[:2]
    c.add(len(got) == 2 and abs(got[0] - 1.5946) <= 5e-3 and abs(got[1] - 5.5470) <= 5e-3,
          f"E0, E1 = {', '.join(f'{e:.6f}' for e in got)}")
    for n, wf in enumerate(res.states[:2]):
        rep = zero_report(wf)
        dp = density_profile(wf)
        c.add(rep.interlaced, f"psi{n} interlaced")
        c.add(dp.min_rho > 1e-12, f"psi{n} nodeless (min rho/max {dp.min_rho:.1e})")
        m = (wf.x >= -6) & (wf.x <= 6)
        amp = np.abs(wf.psi[m])
        nr = len(find_zeros(wf.x[m], wf.psi.real[m], wf.dpsi.real[m], scale=amp).zeros)
        ni = len(find_zeros(wf.x[m], wf.psi.imag[m], wf.dpsi.imag[m], scale=amp).zeros)
        c.add(nr >= 8 and ni >= 8, f"psi{n} zeros on [-6, 6]: {nr} real, {ni} imaginary")
    c.finish()


def test_criterion_4_levai():
    c = Check(4, 120.0)
    out = run_table("2")
    res = solve_spec(PRESETS["levai-complex"])
    want = [-(n - 4.5) ** 2 for n in range(5)]
    dev = max(abs(a - b) for a, b in zip(res.energies, want)) if len(res) == 5 else math.inf
    c.add(len(res) == 5 and dev <= 1e-3, f"5 energies, max dev {dev:.1e}")
    n_l = sum(len(r.lambdas) for r in out.rows)
    n_m = sum(len(r.mus) for r in out.rows)
    c.add(n_l == 15 and n_m == 20, f"{n_l} lambda and {n_m} mu values compared")
    c.add(_rows_ok(out) and all(e[-1] for e in out.energy_checks), _table_summary(out))
    c.finish()


def test_criterion_5_square_well():
    c = Check(5, 60.0)
    out = run_table("3")
    counts = {"b1": (0, 1), "b2": (1, 2), "b3": (2, 1)}
    c.add(all(chk[-1] for chk in out.count_checks), "one bound state for each b")
    for r in out.rows:
        got = (len(r.got_lambdas), len(r.got_mus))
        c.add(got == counts[r.label], f"{r.label} (n_R, n_I) = {got}")
    c.add(_rows_ok(out), _table_summary(out))
    c.finish()


def test_criterion_6_darboux():
    c = Check(6, 120.0)
    for params, table in (((2.0, 0.0, 1.7), "4"), ((1.2, 1.0, 0.02), "5")):
        fam = build_family(*params, levels=6)
        spec = DarbouxOscillator(*params)
        shot = solve_spec(spec)
        want = [-1.0, 1.0, 3.0, 5.0, 7.0]
        d1 = max(abs(a - b) for a, b in zip(fam.energies, want))
        d2 = max(abs(a - b) for a, b in zip(shot.energies, want)) if len(shot) >= 5 else math.inf
        c.add(d1 <= 1e-4 and d2 <= 1e-4, f"{params}: spectrum dev {d1:.0e} (construction), {d2:.0e} (shooting)")
        counts = [(zero_report(fam.states[n + 1]).n_R, zero_report(fam.states[n + 1]).n_I) for n in range(6)]
        c.add(counts == [(n + 1, n) for n in range(6)], f"{params}: counts (n+1, n) for n = 0..5")
        area = zero_total_area(spec, fam.grid).value
        c.add(abs(area) <= 1e-8, f"{params}: |int V_I| = {abs(area):.1e}")
        c.add(max(fam.intertwining) <= 1e-5, f"{params}: intertwining residual {max(fam.intertwining):.1e}")
        out = run_table(table)
        c.add(out.passed, _table_summary(out))
    c.finish()


def _catalog_states():
    out = []
    for name, spec in PRESETS.items():
        res = solve_spec(spec)
        out += [(f"{name}/{n}", wf, spec) for n, wf in enumerate(res.states)]
    for params in ((2.0, 0.0, 1.7), (1.2, 1.0, 0.02)):
        fam = build_family(*params, levels=6)
        out += [(f"family{params}/{n}", wf, fam.potential) for n, wf in enumerate(fam.states)]
    return out


def test_criterion_7_properties():
    c = Check(7, 300.0)
    states = _catalog_states()
    cases = ok = 0
    worst_res, nodes, wbad = 0.0, [], []
    for name, wf, spec in states:
        for rep in phase_sweep(wf, 32):
            cases += 1
            ok += rep.interlaced and rep.count_law
        wd = wronskian_diagnostics(wf, spec)
        worst_res = max(worst_res, wd.residual)
        if not (wd.nonvanishing and wd.sign in "+-"):
            wbad.append(name)
        if density_profile(wf).min_rho <= 1e-12:
            nodes.append(name)
    c.add(ok == cases, f"phase sweep {ok}/{cases} interlaced with |n_R - n_I| <= 1 ({len(states)} states)")
    c.add(worst_res <= 1e-5, f"max Wronskian identity residual {worst_res:.1e}")
    c.add(not wbad, f"W nonvanishing with constant sign ({len(wbad)} exceptions)")
    c.add(not nodes, f"min rho > 0 on interiors ({len(nodes)} exceptions)")
    free = SquareWell(0, 0, 0, 0, 0)
    errs = [abs(integrate(free, 1.0, 0.0, 10.0, 1.0, 1j, h=h)[0] - np.exp(10j)) for h in (0.1, 0.05)]
    ratio = errs[0] / errs[1]
    c.add(12 <= ratio <= 20, f"RK4 error ratio under step halving {ratio:.2f}")
    c.finish()


def test_criterion_8_reproduce_all(capsys):
    from interlace.cli import main
    c = Check(8, 600.0)
    code = main(["reproduce", "all"])
    text = capsys.readouterr().out
    summary = [l for l in text.splitlines() if l.startswith("SUMMARY")]
    c.add(code == 0, f"exit code {code}, {summary[0] if summary else 'no summary'}")
    c.finish()


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
