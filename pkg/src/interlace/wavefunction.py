"""Sampled complex wavefunctions, normalization and global-phase rules."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import simpson

from .grid import Grid

__all__ = ["WaveFunction", "PeakPositive", "SymmetryAdapted", "Raw", "Reference",
           "parse_phase_rule", "normalize", "fix_phase", "simpson_norm", "ZeroNormError"]


class ZeroNormError(ValueError):
    pass


@dataclass(frozen=True)
class PeakPositive:
    """psi real and positive at argmax |psi|."""

    def __str__(self):
        return "peak"


@dataclass(frozen=True)
class SymmetryAdapted:
    """Re psi even and Im psi odd about `center` (odd=True swaps the roles)."""

    center: float = 0.0
    odd: bool = False

    def __str__(self):
        name = "symmetry-odd" if self.odd else "symmetry"
        return f"{name}:{self.center:.12g}" if self.center else name


@dataclass(frozen=True)
class Raw:
    """Multiply by exp(i theta)."""

    theta: float = 0.0

    def __str__(self):
        return f"raw:{self.theta:.12g}"


@dataclass(frozen=True, eq=False)
class Reference:
    """Rotate so that the overlap with a reference function is real positive."""

    ref: NDArray = field(repr=False)
    quarter_turns: int = 0

    def __str__(self):
        return f"reference:{self.quarter_turns}"


def parse_phase_rule(text: str):
    """Parse the CLI form: peak | symmetry[:c] | symmetry-odd[:c] | raw:<theta>."""
    t = text.strip().lower()
    if t == "peak":
        return PeakPositive()
    head, _, tail = t.partition(":")
    if head in ("symmetry", "symmetry-odd"):
        center = float(tail) if tail else 0.0
        return SymmetryAdapted(center, odd=head == "symmetry-odd")
    if t.startswith("raw:"):
        return Raw(float(t[4:]))
    if t == "raw":
        return Raw(0.0)
    raise ValueError(f"unknown phase rule {text!r}")


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid
    psi: NDArray
    dpsi: NDArray
    energy: float
    normalized: bool = False
    phase_rule: object = field(default_factory=Raw)

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex)
        dpsi = np.asarray(self.dpsi, dtype=complex)
        if psi.shape != (self.grid.n_points,) or dpsi.shape != psi.shape:
            raise ValueError("psi and dpsi need one sample per grid point")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "dpsi", dpsi)

    @property
    def x(self):
        return self.grid.x

    @property
    def rho(self):
        return self.psi.real ** 2 + self.psi.imag ** 2

    def rotated(self, theta: float, rule=None) -> "WaveFunction":
        c = np.exp(1j * theta)
        return replace(self, psi=self.psi * c, dpsi=self.dpsi * c,
                       phase_rule=rule if rule is not None else Raw(theta))


def simpson_norm(wf: WaveFunction) -> float:
    return float(simpson(wf.rho, x=wf.x))


def normalize(wf: WaveFunction) -> WaveFunction:
    n = simpson_norm(wf)
    if not np.isfinite(n) or n <= 0:
        raise ZeroNormError("cannot normalize a function with zero or infinite norm")
    s = 1 / np.sqrt(n)
    return replace(wf, psi=wf.psi * s, dpsi=wf.dpsi * s, normalized=True)


def _symmetry_angle(wf: WaveFunction, center: float) -> float:
    """theta in [0, pi) minimizing int |e^{it}psi(x) - conj(e^{it}psi(xbar))|^2.

    The objective is const - 2 Re(e^{2it} int psi(x) psi(xbar) dx), so the
    minimizer is -arg(int psi psi_mirror)/2 in closed form.
    """
    g = wf.grid
    if not g.is_symmetric(center):
        raise ValueError("SymmetryAdapted needs a grid symmetric about its center")
    ov = simpson(wf.psi * wf.psi[::-1], x=g.x)
    return float(np.mod(-np.angle(ov) / 2, np.pi))


def fix_phase(wf: WaveFunction, rule) -> WaveFunction:
    """Apply a global phase convention; every rule is idempotent."""
    if isinstance(rule, str):
        rule = parse_phase_rule(rule)
    if isinstance(rule, Raw):
        return wf.rotated(rule.theta, rule)
    if isinstance(rule, PeakPositive):
        i = int(np.argmax(np.abs(wf.psi)))
        return wf.rotated(-np.angle(wf.psi[i]), rule)
    if isinstance(rule, SymmetryAdapted):
        t = _symmetry_angle(wf, rule.center)
        if rule.odd:
            t += np.pi / 2
        out = wf.rotated(t, rule)
        return _snap_sign(out)
    if isinstance(rule, Reference):
        ov = simpson(np.conj(wf.psi) * rule.ref, x=wf.x)
        return wf.rotated(np.angle(ov) + rule.quarter_turns * np.pi / 2, rule)
    raise TypeError(f"unsupported phase rule {rule!r}")


def _snap_sign(wf: WaveFunction) -> WaveFunction:
    """Fix the residual sign ambiguity: the even part is positive at its peak."""
    part = wf.psi.real if not (isinstance(wf.phase_rule, SymmetryAdapted) and wf.phase_rule.odd) \
        else wf.psi.imag
    i = int(np.argmax(np.abs(part)))
    if part[i] < 0:
        return replace(wf, psi=-wf.psi, dpsi=-wf.dpsi)
    return wf
