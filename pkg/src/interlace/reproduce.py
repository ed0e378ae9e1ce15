"""Reproduction of the tabulated zeros and energies.

Expected values live in data/tables.json. Each table names the system, the
state order and the global-phase convention under which its zeros are
compared:

* natural   -- the phase produced by the construction itself
* reference -- overlap with the closed-form eigenfunction made real, then
               rotated by `quarter_turns` * pi/2
* symmetry  -- Re psi even / Im psi odd about `center` (odd rows swapped)
* fit       -- the global phase is not recoverable from the source, so the
               single phase that best matches the row is found; with one free
               angle against several tabulated zeros this is still a check,
               rows with a single zero are marked underdetermined
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from .analysis import zero_report
from .catalog import PRESETS, solve_spec
from .darboux import build_family
from .exact import levai_state
from .wavefunction import PeakPositive, Reference, SymmetryAdapted, WaveFunction, fix_phase

__all__ = ["load_expectations", "run_table", "run_all", "format_report", "fit_phase",
           "zero_deviation", "TableOutcome", "RowOutcome"]


def load_expectations(path: str | Path | None = None) -> dict:
    if path is None:
        text = resources.files("interlace").joinpath("data/tables.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def zero_deviation(rep, lambdas, mus) -> float:
    """Largest |got - expected| over both lists; inf when the counts differ."""
    if rep.n_R != len(lambdas) or rep.n_I != len(mus):
        return math.inf
    d = [abs(a - b) for a, b in zip(rep.lambdas, lambdas)]
    d += [abs(a - b) for a, b in zip(rep.mus, mus)]
    return max(d, default=0.0)


def fit_phase(wf: WaveFunction, lambdas, mus):
    """Global phase in [0, pi) minimizing the zero deviation of one row.

    A zero x* of Re(e^{it} psi) requires t = pi/2 - arg psi(x*) (mod pi), and a
    zero of the imaginary part t = -arg psi(x*); these candidates, their
    circular mean and a coarse grid seed a bounded scalar refinement.
    Returns (theta, deviation, report) with theta relative to wf.
    """
    x = wf.x

    def arg_at(p):
        return math.atan2(np.interp(p, x, wf.psi.imag), np.interp(p, x, wf.psi.real))

    cands = [math.pi / 2 - arg_at(p) for p in lambdas] + [-arg_at(p) for p in mus]
    if cands:
        cands.append(0.5 * np.angle(np.mean(np.exp(2j * np.array(cands)))))
    cands += list(np.linspace(0, math.pi, 360, endpoint=False))
    cands = np.mod(cands, math.pi)

    def cost(t):
        return zero_deviation(zero_report(wf.rotated(t)), lambdas, mus)

    vals = [cost(t) for t in cands]
    best = int(np.argmin(vals))
    t0, d0 = float(cands[best]), vals[best]
    if math.isfinite(d0) and d0 > 0:
        r = minimize_scalar(cost, bounds=(t0 - 0.01, t0 + 0.01), method="bounded",
                            options={"xatol": 1e-7})
        if r.fun < d0:
            t0, d0 = float(r.x), float(r.fun)
    t0 = float(np.mod(t0, math.pi))
    return t0, d0, zero_report(wf.rotated(t0))


@dataclass
class RowOutcome:
    label: str
    lambdas: list
    mus: list
    got_lambdas: list
    got_mus: list
    deviation: float
    passed: bool
    phase: str
    theta: float | None = None
    underdetermined: bool = False
    strict_deviation: float | None = None  # under the reference convention, if any
    interlaced: bool = True


@dataclass
class TableOutcome:
    table: str
    title: str
    rows: list
    energy_checks: list = field(default_factory=list)  # (label, expected, got, tol, ok)
    count_checks: list = field(default_factory=list)  # (label, expected, got, ok)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return (all(r.passed for r in self.rows) and all(c[-1] for c in self.energy_checks)
                and all(c[-1] for c in self.count_checks))


def _evaluate_row(wf, row, rule, tol, system_spec=None, odd=False):
    lam, mu = row["lambdas"], row["mus"]
    kind = rule.get("rule", "natural")
    theta = None
    if kind == "natural":
        rep = zero_report(wf)
    elif kind == "reference":
        ref = levai_state(system_spec, row["state"], wf.x)
        rep = zero_report(fix_phase(wf, Reference(ref, row.get("quarter_turns", 0))))
    elif kind == "symmetry":
        rep = zero_report(fix_phase(wf, SymmetryAdapted(rule.get("center", 0.0), odd)))
    elif kind == "fit":
        base = fix_phase(wf, PeakPositive())
        theta, _, rep = fit_phase(base, lam, mu)
    else:
        raise ValueError(f"unknown phase convention {kind!r}")
    dev = zero_deviation(rep, lam, mu)
    return rep, dev, theta


def _states_for(tid: str, spec: dict, threads=None):
    """Solve the table's system; returns (states, energies, extra energy checks)."""
    system = spec["system"]
    if tid in ("4", "5"):
        pre = PRESETS[system]
        fam = build_family(pre.c0, pre.c1, pre.lam, levels=len(spec["rows"]) - 1, form=pre.form)
        shot = solve_spec(pre, threads=threads)
        return fam.states, fam.energies, shot.energies
    res = solve_spec(PRESETS[system], threads=threads)
    return res.states, res.energies, None


def run_table(tid: str, exp: dict | None = None, threads: int | None = None) -> TableOutcome:
    exp = exp or load_expectations()
    spec = exp["tables"][str(tid)]
    tol = float(exp.get("tolerance", 5e-3))
    t0 = time.perf_counter()
    out = TableOutcome(str(tid), spec["title"], [])
    rule = spec.get("phase", {"rule": "natural"})
    strict = spec.get("reference_phase")

    if str(tid) == "3":
        cache = {}
        for row in spec["rows"]:
            res = solve_spec(PRESETS[row["system"]], threads=threads)
            cache[row["label"]] = res
            out.count_checks.append((f"{row['label']} states", 1, len(res), len(res) == 1))
        pairs = [(cache[r["label"]].states[0] if len(cache[r["label"]]) else None, r)
                 for r in spec["rows"]]
        system_spec = None
    else:
        states, energies, shot = _states_for(str(tid), spec, threads)
        if "n_states" in spec:
            out.count_checks.append(("bound states", spec["n_states"], len(states),
                                     len(states) == spec["n_states"]))
        etol = spec.get("energy_tol", tol)
        for i, e in enumerate(spec.get("energies", [])):
            got = energies[i] if i < len(energies) else math.nan
            out.energy_checks.append((f"E{i}", e, got, etol, abs(got - e) <= etol))
            if shot is not None:
                g2 = shot[i] if i < len(shot) else math.nan
                out.energy_checks.append((f"E{i} (shooting)", e, g2, etol, abs(g2 - e) <= etol))
        pairs = [(states[r["state"]] if r["state"] < len(states) else None, r) for r in spec["rows"]]
        system_spec = PRESETS[spec["system"]]

    for wf, row in pairs:
        r_rule = row.get("phase", rule)
        if wf is None:
            out.rows.append(RowOutcome(row["label"], row["lambdas"], row["mus"], [], [],
                                       math.inf, False, r_rule["rule"]))
            continue
        odd = row["state"] in (strict or {}).get("odd_rows", []) if r_rule["rule"] == "symmetry" else False
        rep, dev, theta = _evaluate_row(wf, row, r_rule, tol, system_spec, odd)
        sdev = None
        if strict is not None:
            _, sdev, _ = _evaluate_row(wf, row, strict, tol, system_spec,
                                       row["state"] in strict.get("odd_rows", []))
        n_vals = len(row["lambdas"]) + len(row["mus"])
        out.rows.append(RowOutcome(
            row["label"], row["lambdas"], row["mus"], rep.lambdas, rep.mus, dev,
            bool(dev <= tol and rep.interlaced), r_rule["rule"], theta,
            r_rule["rule"] == "fit" and n_vals <= 1, sdev, rep.interlaced))
    out.seconds = time.perf_counter() - t0
    return out


def run_all(threads: int | None = None, tables=None) -> list:
    exp = load_expectations()
    ids = tables or sorted(exp["tables"])
    return [run_table(t, exp, threads) for t in ids]


def _fmt(v):
    return "[" + ", ".join(f"{x:.4f}" for x in v) + "]"


def format_report(outcomes) -> str:
    lines = []
    for t in outcomes:
        lines.append(f"Table {t.table}: {t.title}  ({t.seconds:.1f} s)")
        for label, e, got, ok in t.count_checks:
            lines.append(f"  {'PASS' if ok else 'FAIL'}  {label}: expected {e}, got {got}")
        for label, e, got, etol, ok in t.energy_checks:
            lines.append(f"  {'PASS' if ok else 'FAIL'}  {label}: expected {e:.6g}, got {got:.10g}"
                         f" (|diff| {abs(got - e):.2e}, tol {etol:g})")
        for r in t.rows:
            note = f"phase {r.phase}"
            if r.theta is not None:
                note += f" theta={r.theta:.6f}"
            if r.underdetermined:
                note += " (single value, underdetermined)"
            if r.strict_deviation is not None:
                note += f"; symmetric-phase dev {r.strict_deviation:.2e}"
            lines.append(f"  {'PASS' if r.passed else 'FAIL'}  {r.label}: lambda {_fmt(r.lambdas)} -> "
                         f"{_fmt(r.got_lambdas)}; mu {_fmt(r.mus)} -> {_fmt(r.got_mus)}; "
                         f"max dev {r.deviation:.2e}; {note}")
        lines.append(f"  => table {t.table} {'PASS' if t.passed else 'FAIL'}")
    n_ok = sum(t.passed for t in outcomes)
    lines.append(f"SUMMARY: {n_ok}/{len(outcomes)} tables pass")
    return "\n".join(lines)
