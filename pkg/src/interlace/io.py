"""JSON and CSV persistence for solver, Darboux and analysis results.

All JSON documents carry ``"schema": "v1"`` and a ``"kind"`` field. Floats
are rounded to 12 significant digits before encoding so identical inputs
give byte-identical files. Complex scalars are written as ``[re, im]``.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .grid import Grid
from .potentials import spec_from_dict, spec_to_dict
from .wavefunction import Raw, WaveFunction, parse_phase_rule

SCHEMA = "v1"
DIGITS = 12

__all__ = ["SCHEMA", "dumps", "write_json", "read_json", "state_to_dict", "state_from_dict",
           "result_to_dict", "result_from_dict", "family_to_dict", "write_state_csv",
           "write_potential_csv", "write_report_csv", "decimate"]


class SchemaError(ValueError):
    pass


def _r(v: float) -> float:
    return float(f"{v:.{DIGITS}g}")


def _clean(obj):
    """Recursively convert numpy/complex values into rounded JSON values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return _r(v) if np.isfinite(v) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def dumps(doc: dict, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(_clean(doc), indent=1, allow_nan=False) + "\n"
    return json.dumps(_clean(doc), separators=(",", ":"), allow_nan=False) + "\n"


def write_json(path, doc: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc))
    return path


def read_json(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise SchemaError(f"{path}: missing or unsupported schema (want {SCHEMA!r})")
    return doc


def decimate(wf: WaveFunction, stride: int = 1) -> WaveFunction:
    """Keep every `stride`-th sample; leftover samples are trimmed evenly from both ends."""
    if stride <= 1:
        return wf
    g = wf.grid
    m = (g.n_points - 1) // stride
    if ((g.n_points - 1) % stride) % 2 and stride % 2 and m > 1:
        m -= 1  # an even leftover keeps a symmetric grid symmetric
    start = (g.n_points - 1 - m * stride) // 2
    sub = Grid(g.x_min + start * g.h, g.x_min + (start + m * stride) * g.h, m + 1)
    sl = slice(start, start + m * stride + 1, stride)
    return WaveFunction(sub, wf.psi[sl], wf.dpsi[sl], wf.energy, wf.normalized, wf.phase_rule)


# --- states and results ------------------------------------------------------

def state_to_dict(wf: WaveFunction, stride: int = 1) -> dict:
    wf = decimate(wf, stride)
    return {"energy": wf.energy, "phase_rule": str(wf.phase_rule), "normalized": wf.normalized,
            "grid": wf.grid.to_dict(),
            "psi_re": wf.psi.real, "psi_im": wf.psi.imag,
            "dpsi_re": wf.dpsi.real, "dpsi_im": wf.dpsi.imag}


def state_from_dict(doc: dict) -> WaveFunction:
    try:
        grid = Grid.from_dict(doc["grid"])
        psi = np.asarray(doc["psi_re"], float) + 1j * np.asarray(doc["psi_im"], float)
        if "dpsi_re" in doc:
            dpsi = np.asarray(doc["dpsi_re"], float) + 1j * np.asarray(doc["dpsi_im"], float)
        else:
            dpsi = np.gradient(psi, grid.h)
        try:
            rule = parse_phase_rule(doc.get("phase_rule", "raw:0"))
        except ValueError:
            rule = Raw(0.0)  # reference-based rules cannot be rebuilt without the reference
        return WaveFunction(grid, psi, dpsi, float(doc["energy"]), bool(doc.get("normalized", True)),
                            rule)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad state record: {exc}") from exc


def result_to_dict(res, stride: int = 1, extra: dict | None = None) -> dict:
    """Document for a BoundStateResult (or anything with the same fields)."""
    doc = {"schema": SCHEMA, "kind": "result", "method": res.method,
           "potential": spec_to_dict(res.spec) if res.spec is not None else None,
           "energies": list(res.energies), "residuals": list(res.residuals),
           "warnings": list(res.warnings),
           "states": [state_to_dict(wf, stride) for wf in res.states]}
    if extra:
        doc.update(extra)
    return doc


def result_from_dict(doc: dict):
    """(potential spec or None, energies, residuals, states) from a result document."""
    if doc.get("kind") not in ("result", "darboux"):
        raise SchemaError(f"expected a result document, got kind={doc.get('kind')!r}")
    try:
        spec = spec_from_dict(doc["potential"]) if doc.get("potential") else None
        states = [state_from_dict(s) for s in doc["states"]]
        return spec, list(doc["energies"]), list(doc.get("residuals", [])), states
    except KeyError as exc:
        raise SchemaError(f"missing field {exc}") from exc


def family_to_dict(fam, spec, stride: int = 1) -> dict:
    from .potentials import zero_total_area

    area = zero_total_area(spec, fam.grid)
    manifest = {"c0": fam.alpha.c0, "c1": fam.alpha.c1, "lambda": fam.alpha.lam,
                "E0": fam.alpha.E0, "form": fam.alpha.form, "path": fam.alpha.path,
                "levels": len(fam.states) - 1, "riccati_residual": fam.riccati,
                "intertwining_residuals": fam.intertwining, "imag_area": area.value}
    return {"schema": SCHEMA, "kind": "darboux", "method": "Darboux",
            "potential": spec_to_dict(spec), "manifest": manifest,
            "energies": fam.energies, "residuals": fam.intertwining, "warnings": [],
            "states": [state_to_dict(wf, stride) for wf in fam.states]}


# --- CSV -------------------------------------------------------------------------

def _write_csv(path, header, cols) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([f"{v:.{DIGITS}g}" for v in row])
    return path


def write_state_csv(path, wf: WaveFunction, stride: int = 1) -> Path:
    wf = decimate(wf, stride)
    return _write_csv(path, ["x", "psi_re", "psi_im", "rho"],
                      [wf.x, wf.psi.real, wf.psi.imag, wf.rho])


def write_potential_csv(path, spec, grid: Grid) -> Path:
    v = spec(grid.x)
    return _write_csv(path, ["x", "V_re", "V_im"], [grid.x, v.real, v.imag])


def write_report_csv(path, wf: WaveFunction, W) -> Path:
    return _write_csv(path, ["x", "psi_re", "psi_im", "rho", "W"],
                      [wf.x, wf.psi.real, wf.psi.imag, wf.rho, W])
