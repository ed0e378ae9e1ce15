"""Bound states, Darboux partners and zero interlacing for complex 1D potentials."""
from .grid import Grid
from .potentials import (PotentialSpec, PoschlTeller, SinusoidalWell, CubicOscillator, Levai,
                         SquareWell, DarbouxOscillator, Sampled, ClassLabel, eval_potential,
                         classify, pt_check, zero_total_area, spec_to_dict, spec_from_dict)
from .wavefunction import (WaveFunction, PeakPositive, SymmetryAdapted, Raw, Reference,
                           normalize, fix_phase)
from .solver import (BoundStateResult, TransferMatrix, integrate, transfer_matrix,
                     find_bound_states_shortrange, find_bound_states_confining)
from .analysis import (ZeroReport, find_zeros, interlacing_check, count_law_check, zero_report,
                       wronskian_diagnostics, density_profile, residual_oracle)
from .darboux import (seed_oscillator_state, ermakov_alpha, superpotential, darboux_potential,
                      partner_state, missing_state, build_family, OSCILLATOR_SEED)
from .catalog import PRESETS, preset, solve_spec

__all__ = [
    "Grid", "PotentialSpec", "PoschlTeller", "SinusoidalWell", "CubicOscillator", "Levai",
    "SquareWell", "DarbouxOscillator", "Sampled", "ClassLabel", "eval_potential", "classify",
    "pt_check", "zero_total_area", "spec_to_dict", "spec_from_dict", "WaveFunction",
    "PeakPositive", "SymmetryAdapted", "Raw", "Reference", "normalize", "fix_phase",
    "BoundStateResult", "TransferMatrix", "integrate", "transfer_matrix",
    "find_bound_states_shortrange", "find_bound_states_confining", "ZeroReport", "find_zeros",
    "interlacing_check", "count_law_check", "zero_report", "wronskian_diagnostics",
    "density_profile", "residual_oracle", "seed_oscillator_state", "ermakov_alpha",
    "superpotential", "darboux_potential", "partner_state", "missing_state", "build_family",
    "OSCILLATOR_SEED", "PRESETS", "preset", "solve_spec",
]

__version__ = "0.1.0"
