"""Command-line front end: catalog, solve, analyze, darboux, reproduce.

Exit codes: 0 success, 1 reproduction mismatch, 2 configuration or usage
error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import io
from .catalog import ALIASES, PRESETS, family_listing, preset, solve_spec
from .grid import Grid
from .potentials import FAMILIES, PARAM_NAMES, spec_from_dict, spec_to_dict
from .solver import MagnitudeOverflowError, TruncationError, default_threads
from .wavefunction import ZeroNormError, fix_phase, parse_phase_rule

log = logging.getLogger("interlace")

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
OUT_ENV = "INTERLACE_OUT"


class ConfigError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
        return v
    return conv


def _number(text: str):
    v = complex(text.replace(" ", "").replace("i", "j"))
    return v.real if v.imag == 0 else v


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or "interlace_out")


# --- potential selection ---------------------------------------------------------

def _resolve_spec(args, extra: list):
    """Potential from --preset / --family / --spec plus `--param k=v` and `--k v` overrides."""
    overrides = {}
    for item in args.param or []:
        k, sep, v = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects name=value, got {item!r}")
        overrides[k.strip()] = v
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        k, sep, v = tok[2:].partition("=")
        if not sep:
            v = next(it, None)
            if v is None:
                raise ConfigError(f"missing value for {tok}")
        overrides[k] = v

    if args.spec:
        text = args.spec
        doc = json.loads(Path(text).read_text() if Path(text).exists() else text)
        doc = doc.get("potential", doc)
        base_family, base = doc["family"], dict(doc.get("params", {}))
        name = base_family.lower()
    elif args.preset:
        d = spec_to_dict(_preset(args.preset))
        base_family, base, name = d["family"], d["params"], ALIASES.get(args.preset, args.preset)
    elif args.family:
        if args.family not in FAMILIES:
            raise ConfigError(f"unknown family {args.family!r}; see `catalog`")
        base_family, base, name = args.family, {}, args.family.lower()
    else:
        raise ConfigError("choose a potential with --preset, --family or --spec")

    allowed = set(PARAM_NAMES.get(base_family, ())) | {"form", "lam"}
    for k, v in overrides.items():
        if k not in allowed:
            raise ConfigError(f"{base_family} has no parameter {k!r} (have {sorted(allowed)})")
        base[k] = v if k == "form" else _number(v)
    for k, v in list(base.items()):
        if isinstance(v, complex):
            base[k] = [v.real, v.imag]
    spec = spec_from_dict({"family": base_family, "params": base})
    return spec, name


def _preset(name):
    try:
        return preset(name)
    except KeyError as e:
        raise ConfigError(f"{e.args[0]}; see `catalog`") from None


# --- commands --------------------------------------------------------------------

def cmd_catalog(args, extra) -> int:
    if extra:
        raise ConfigError(f"unexpected arguments {extra}")
    if args.preset:
        spec = _preset(args.preset)
        print(io.dumps(spec_to_dict(spec), pretty=True) if args.json else repr(spec), end="" if args.json else "\n")
        return EXIT_OK
    if args.json:
        doc = {"schema": io.SCHEMA, "kind": "catalog", "families": family_listing(),
               "presets": {k: spec_to_dict(v) for k, v in PRESETS.items()}}
        print(io.dumps(doc, pretty=True), end="")
        return EXIT_OK
    print("families:")
    for f in family_listing():
        print(f"  {f['family']:<18} ({', '.join(f['params'])})  V = {f['form']}")
    print("presets:")
    for k, v in PRESETS.items():
        print(f"  {k:<18} {v!r}")
    return EXIT_OK


def _formats(args):
    both = not (args.json or args.csv)
    return args.json or both, args.csv or both


def cmd_solve(args, extra) -> int:
    spec, name = _resolve_spec(args, extra)
    name = args.name or name
    opts = {"h": args.step, "threads": args.threads}
    if args.tol_reality is not None:
        opts["reality_tol"] = args.tol_reality
    if args.tol_warn is not None:
        opts["warn_tol"] = args.tol_warn
    if args.tol_residual is not None:
        opts["residual_tol"] = args.tol_residual
    if args.emin is not None or args.emax is not None:
        if args.emin is None or args.emax is None or args.emin >= args.emax:
            raise ConfigError("--emin and --emax must both be given with emin < emax")
        opts["E_window"] = (args.emin, args.emax)
    if args.x_trunc is not None:
        opts["x_trunc"] = args.x_trunc
    if args.grid_min is not None or args.grid_max is not None:
        lo, hi = args.grid_min, args.grid_max
        opts["x_trunc"] = max(abs(v) for v in (lo, hi) if v is not None)
    if args.grid_points is not None:
        width = 2 * opts.get("x_trunc") if "x_trunc" in opts else None
        if width is None:
            raise ConfigError("--grid-points needs --grid-min/--grid-max or --x-trunc")
        opts["h"] = width / (args.grid_points - 1)
    if args.method == "transfer" and spec.interaction_zone is None:
        raise ConfigError(f"method 'transfer' needs a short-range potential; {spec.family} is not")
    if args.method == "transfer":
        for k in ("E_window", "x_trunc"):
            opts.pop(k, None)
    res = solve_spec(spec, method=args.method, **opts)
    if args.phase:
        rule = parse_phase_rule(args.phase)
        res = type(res)(res.energies, [fix_phase(w, rule) for w in res.states], res.residuals,
                        res.method, res.complex_energies, res.warnings, res.spec)
    for w in res.warnings:
        log.warning(w)
    out = _out_dir(args)
    want_json, want_csv = _formats(args)
    if want_json:
        p = io.write_json(out / f"{name}.json", io.result_to_dict(res, args.stride))
        print(f"wrote {p}")
    if want_csv:
        for n, wf in enumerate(res.states):
            io.write_state_csv(out / f"{name}_state{n}.csv", wf, args.stride)
    print(f"{len(res)} bound state(s) [{res.method}]")
    for n, (E, r) in enumerate(zip(res.energies, res.residuals)):
        print(f"  E{n} = {E:.12g}   residual {r:.2e}")
    if not len(res) and not args.allow_empty:
        log.error("no bound states found (use --allow-empty to accept)")
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_analyze(args, extra) -> int:
    if extra:
        raise ConfigError(f"unexpected arguments {extra}")
    from .analysis import state_report, wronskian

    path = Path(args.result)
    if not path.exists():
        raise ConfigError(f"no such file: {path}")
    spec, energies, _, states = io.result_from_dict(io.read_json(path))
    rule = parse_phase_rule(args.phase) if args.phase else None
    reports = []
    out = _out_dir(args)
    stem = args.name or path.stem + "_report"
    for n, wf in enumerate(states):
        if rule is not None:
            wf = fix_phase(wf, rule)
        rep = state_report(wf, spec, sweep=args.sweep)
        rep["index"] = n
        reports.append(rep)
        if not args.json or args.csv:
            io.write_report_csv(out / f"{stem}_state{n}.csv", wf, wronskian(wf))
        print(f"state {n}: E={wf.energy:.10g}  (n_R, n_I)=({rep['n_R']}, {rep['n_I']})  "
              f"interlaced={rep['interlaced']}  W {rep['wronskian']['sign']}  "
              f"maxima={rep['density']['n_maxima']}")
    doc = {"schema": io.SCHEMA, "kind": "report", "source": str(path),
           "potential": spec_to_dict(spec) if spec is not None else None, "states": reports}
    if not args.csv or args.json:
        print(f"wrote {io.write_json(out / f'{stem}.json', doc)}")
    return EXIT_OK


def cmd_darboux(args, extra) -> int:
    if extra:
        raise ConfigError(f"unexpected arguments {extra}")
    from .darboux import build_family
    from .potentials import DarbouxOscillator

    lo = -10.0 if args.grid_min is None else args.grid_min
    hi = 10.0 if args.grid_max is None else args.grid_max
    npts = 20001 if args.grid_points is None else args.grid_points
    try:
        grid = Grid(lo, hi, npts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    spec = DarbouxOscillator(args.c0, args.c1, args.lam, args.form)
    fam = build_family(args.c0, args.c1, args.lam, levels=args.levels, grid=grid, form=args.form)
    if args.phase:
        rule = parse_phase_rule(args.phase)
        fam.states[:] = [fix_phase(w, rule) for w in fam.states]
    name = args.name or f"darboux_c0={args.c0:g}_c1={args.c1:g}_lambda={args.lam:g}"
    out = _out_dir(args)
    want_json, want_csv = _formats(args)
    if want_json:
        print(f"wrote {io.write_json(out / f'{name}.json', io.family_to_dict(fam, spec, args.stride))}")
    if want_csv:
        io.write_potential_csv(out / f"{name}_potential.csv", spec, grid)
        for n, wf in enumerate(fam.states):
            io.write_state_csv(out / f"{name}_state{n}.csv", wf, args.stride)
    pt = " (PT-symmetric)" if args.c1 == 0 else ""
    print(f"Darboux partner of x^2{pt}: c0={args.c0:g} c1={args.c1:g} lambda={args.lam:g} "
          f"E0={fam.alpha.E0:g} form={args.form}")
    print(f"  Riccati residual {fam.riccati:.2e}; max intertwining residual {max(fam.intertwining):.2e}")
    for n, E in enumerate(fam.energies):
        print(f"  psi{n}: E = {E:g}")
    return EXIT_OK


def cmd_reproduce(args, extra) -> int:
    if extra:
        raise ConfigError(f"unexpected arguments {extra}")
    from .reproduce import format_report, load_expectations, run_table

    exp = load_expectations(args.expectations)
    ids = sorted(exp["tables"]) if args.table == "all" else [args.table]
    for t in ids:
        if t not in exp["tables"]:
            raise ConfigError(f"unknown table {t!r}; have {sorted(exp['tables'])} or 'all'")
    outcomes = [run_table(t, exp, args.threads) for t in ids]
    print(format_report(outcomes))
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_MISMATCH


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="interlace", description=__doc__.splitlines()[0],
                                allow_abbrev=False)
    p.add_argument("--threads", type=_positive(int), default=None,
                   help="cap on parallel workers (default: available cores)")
    p.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./interlace_out)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", allow_abbrev=False, help="list potential families and presets")
    c.add_argument("--preset")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_catalog)

    def outputs(q):
        q.add_argument("--json", action="store_true", help="write JSON only")
        q.add_argument("--csv", action="store_true", help="write CSV only")
        q.add_argument("--name", help="file stem for outputs")
        q.add_argument("--phase", help="phase rule: peak | symmetry[:CENTER] | symmetry-odd[:CENTER] | raw:THETA")

    def grid(q):
        q.add_argument("--grid-min", type=float)
        q.add_argument("--grid-max", type=float)
        q.add_argument("--grid-points", type=_positive(int))
        q.add_argument("--stride", type=_positive(int), default=1, help="keep every n-th sample on output")

    s = sub.add_parser("solve", allow_abbrev=False, help="find bound states; unknown --NAME VALUE pairs set parameters")
    s.add_argument("--preset")
    s.add_argument("--family")
    s.add_argument("--spec", help="potential JSON document or path to one")
    s.add_argument("--param", action="append", metavar="NAME=VALUE")
    s.add_argument("--method", choices=["transfer", "shooting"])
    s.add_argument("--emin", type=float)
    s.add_argument("--emax", type=float)
    s.add_argument("--x-trunc", type=_positive(float))
    s.add_argument("--step", type=_positive(float), default=1e-3, help="RK4 step")
    s.add_argument("--tol-reality", type=_positive(float))
    s.add_argument("--tol-warn", type=_positive(float))
    s.add_argument("--tol-residual", type=_positive(float))
    s.add_argument("--allow-empty", action="store_true")
    outputs(s)
    grid(s)
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("analyze", allow_abbrev=False, help="zero, Wronskian and density report for a result file")
    a.add_argument("result")
    a.add_argument("--sweep", type=int, default=0, help="also sweep N global phases")
    outputs(a)
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("darboux", allow_abbrev=False, help="complex Darboux partner of the oscillator")
    d.add_argument("--c0", type=float, default=2.0)
    d.add_argument("--c1", type=float, default=0.0)
    d.add_argument("--lambda", dest="lam", type=float, default=1.7)
    d.add_argument("--levels", type=_positive(int), default=5)
    d.add_argument("--form", choices=["general", "oscillator"], default="general")
    outputs(d)
    grid(d)
    d.set_defaults(func=cmd_darboux)

    r = sub.add_parser("reproduce", allow_abbrev=False, help="compare tabulated zeros and energies")
    r.add_argument("table", help="table id (1-5) or 'all'")
    r.add_argument("--expectations", help="alternative expectations JSON")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if extra and args.command != "solve":
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    if args.threads is None:
        args.threads = default_threads()
    from .darboux import NonNormalizableError, RadicandError
    try:
        return args.func(args, extra)
    except RadicandError as exc:
        where = f" at x = {exc.x:.6g}" if exc.x is not None else ""
        print(f"error: inadmissible parameters: {exc}{where}", file=sys.stderr)
        return EXIT_CONFIG
    except (MagnitudeOverflowError, TruncationError, NonNormalizableError, ZeroNormError,
            NumericalFailure, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, io.SchemaError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
