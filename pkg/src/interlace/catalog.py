"""Named parameter presets and per-family default solver settings."""
from __future__ import annotations

from .potentials import (CubicOscillator, DarbouxOscillator, Levai, PoschlTeller,
                         PotentialSpec, SinusoidalWell, SquareWell, PARAM_NAMES)

PRESETS = {
    "poschl-teller": PoschlTeller(2.0),
    "sinusoidal-deep": SinusoidalWell(30.0, 0.49),
    "cubic": CubicOscillator(),
    "levai-complex": Levai(-7 + 1j, -3 - 1j, 0.1, 1.0),
    "square-well-short": SquareWell(3.0, 4.2762, -1.0, -0.2, 0.1),
    "square-well-mid": SquareWell(3.0, 4.4691, -1.0, -0.2, 0.1),
    "square-well-long": SquareWell(3.0, 8.9158, -1.0, -0.2, 0.1),
    "darboux-pt": DarbouxOscillator(2.0, 0.0, 1.7),
    "darboux-nonpt": DarbouxOscillator(1.2, 1.0, 0.02),
}

# older preset names, still accepted on the command line
ALIASES = {
    "sinusoidal-paper": "sinusoidal-deep",
    "levai-paper": "levai-complex",
    "fig5-upper": "square-well-short",
    "fig5-middle": "square-well-mid",
    "fig5-lower": "square-well-long",
}


def preset(name: str) -> PotentialSpec:
    """Look up a preset by name or alias; KeyError lists the known names."""
    key = ALIASES.get(name, name)
    if key not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    return PRESETS[key]


FAMILY_DOC = {
    "PoschlTeller": "-(k/cosh kx)^2 [1 + i sinh kx]",
    "SinusoidalWell": "W0 (cos^2 x + i V0 sin 2x) on [0, pi], W0 outside",
    "CubicOscillator": "x^2 + 2i x^3",
    "Levai": "hyperbolic Scarf-type potential at kx + i eps, complex nu and mu",
    "SquareWell": "V0 + i Vi1 on [-a, 0), V0 + i Vi2 on [0, b), 0 outside",
    "DarbouxOscillator": "x^2 + 2 beta' with the erf Ermakov function, E0 = -1",
}


def default_method(spec: PotentialSpec) -> str:
    return "transfer" if spec.interaction_zone is not None else "shooting"


def default_options(spec: PotentialSpec) -> dict:
    """Solver keyword arguments that cover each family's bound spectrum."""
    if isinstance(spec, PoschlTeller):
        k2 = spec.kappa ** 2
        return {"E_window": (-0.98 * k2, -1e-3 * k2), "x_trunc": 40.0 / spec.kappa}
    if isinstance(spec, CubicOscillator):
        return {"E_window": (0.0, 8.0), "x_trunc": 6.0}
    if isinstance(spec, Levai):
        top = -(spec.nu + spec.mu).real / 2 + 1
        return {"E_window": (-spec.kappa ** 2 * top ** 2, -1e-3), "x_trunc": 40.0 / spec.kappa,
                "scan_points": 300}
    if isinstance(spec, DarbouxOscillator):
        return {"E_window": (-2.0, 8.0), "x_trunc": 8.0}
    if isinstance(spec, (SinusoidalWell, SquareWell)):
        return {}
    return {"E_window": (0.0, 10.0), "x_trunc": 10.0}


def family_listing() -> list:
    return [{"family": f, "params": list(p), "form": FAMILY_DOC[f]} for f, p in PARAM_NAMES.items()]


def solve_spec(spec: PotentialSpec, method: str | None = None, **opts):
    """Solve with family defaults, overridden by opts."""
    from .solver import find_bound_states_confining, find_bound_states_shortrange

    method = method or default_method(spec)
    kw = {**default_options(spec), **{k: v for k, v in opts.items() if v is not None}}
    if method == "transfer":
        if spec.interaction_zone is None:
            raise ValueError(f"transfer method needs a short-range potential, not {spec.family}")
        kw = {k: v for k, v in kw.items() if k not in ("E_window", "x_trunc", "scan_points")}
        return find_bound_states_shortrange(spec, **kw)
    if method == "shooting":
        kw = {k: v for k, v in kw.items() if k not in ("k_region", "grid_density")}
        return find_bound_states_confining(spec, **kw)
    raise ValueError(f"unknown method {method!r}")
