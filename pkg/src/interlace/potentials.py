"""Catalog of complex one-dimensional potentials.

Every potential is an immutable spec object that can be evaluated at real
points (scalar or array) and serialized to the JSON form

    {"family": <name>, "params": {<name>: number | [re, im]}}

Units are hbar = 2m = 1, so H = -d^2/dx^2 + V(x).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import ClassVar, NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import simpson
from scipy.optimize import brentq

from .grid import Grid

__all__ = [
    "PotentialSpec", "PoschlTeller", "SinusoidalWell", "CubicOscillator", "Levai",
    "SquareWell", "DarbouxOscillator", "Sampled", "ClassLabel", "AreaResult",
    "eval_potential", "classify", "pt_check", "zero_total_area",
    "spec_to_dict", "spec_from_dict", "FAMILIES",
]


def _step(x):
    """Right-continuous Heaviside step."""
    return (np.asarray(x) >= 0).astype(float)


def _cosh_sinh(re, im):
    """cosh and sinh of re + i*im via real/imaginary decomposition."""
    c, s = np.cos(im), np.sin(im)
    ch, sh = np.cosh(re), np.sinh(re)
    return ch * c + 1j * sh * s, sh * c + 1j * ch * s


class PotentialSpec:
    """Base class for potentials. Subclasses are frozen dataclasses."""

    family: ClassVar[str] = ""
    # Interval outside of which V is constant (short-range families only).
    support: ClassVar[tuple | None] = None

    def __call__(self, x: ArrayLike):
        x = np.asarray(x, dtype=float)
        v = self._eval(x)
        return complex(v) if v.ndim == 0 else v

    def _eval(self, x: NDArray) -> NDArray:
        raise NotImplementedError

    @property
    def breakpoints(self) -> tuple:
        """Points where V or a low derivative is discontinuous."""
        return ()

    @property
    def interaction_zone(self) -> tuple | None:
        return None

    @property
    def outside_value(self) -> complex | None:
        """Constant value of V outside the interaction zone, if any."""
        return None

    def params(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class PoschlTeller(PotentialSpec):
    """V = -(k/cosh kx)^2 [1 + i sinh kx]; single bound state at -k^2/4."""

    kappa: float = 2.0
    family: ClassVar[str] = "PoschlTeller"

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("PoschlTeller requires kappa > 0")

    def _eval(self, x):
        k = self.kappa
        sech2 = 1.0 / np.cosh(k * x) ** 2
        return -k * k * sech2 * (1.0 + 1j * np.sinh(k * x))


@dataclass(frozen=True)
class SinusoidalWell(PotentialSpec):
    """W0 (cos^2 x + i V0 sin 2x) on [0, pi], W0 elsewhere."""

    W0: float = 30.0
    V0: float = 0.49
    family: ClassVar[str] = "SinusoidalWell"

    def __post_init__(self):
        if abs(self.V0) > 0.5:
            raise ValueError("SinusoidalWell needs |V0| <= 1/2 (unbroken regime)")

    @property
    def support(self):
        return (0.0, math.pi)

    @property
    def breakpoints(self):
        return (0.0, math.pi)

    @property
    def interaction_zone(self):
        return (0.0, math.pi)

    @property
    def outside_value(self):
        return complex(self.W0)

    def _eval(self, x):
        inside = (x >= 0.0) & (x <= math.pi)
        v = self.W0 * (np.cos(x) ** 2 + 1j * self.V0 * np.sin(2 * x))
        return np.where(inside, v, complex(self.W0))


@dataclass(frozen=True)
class CubicOscillator(PotentialSpec):
    """V = x^2 + 2i x^3."""

    family: ClassVar[str] = "CubicOscillator"

    def _eval(self, x):
        return x * x + 2j * x ** 3


@dataclass(frozen=True)
class Levai(PotentialSpec):
    """Non-PT hyperbolic potential with Jacobi-polynomial eigenfunctions.

    nu and mu are complex; the hyperbolics are taken at kappa*x + i*eps.
    """

    nu: complex = -7 + 1j
    mu: complex = -3 - 1j
    eps: float = 0.1
    kappa: float = 1.0
    family: ClassVar[str] = "Levai"

    def __post_init__(self):
        object.__setattr__(self, "nu", complex(self.nu))
        object.__setattr__(self, "mu", complex(self.mu))

    def energy(self, n: int) -> complex:
        """Closed-form level -kappa^2 (n + (nu+mu+1)/2)^2."""
        return -self.kappa ** 2 * (n + (self.nu + self.mu + 1) / 2) ** 2

    def n_levels(self) -> int:
        """Number of regular states, n < -(Re(nu+mu)+1)/2."""
        bound = -((self.nu + self.mu).real + 1) / 2
        return max(0, int(math.ceil(bound)))

    def _eval(self, x):
        k, nu, mu = self.kappa, self.nu, self.mu
        ch, sh = _cosh_sinh(k * x, self.eps)
        a = (nu * nu + mu * mu) / 2 - 0.25
        b = (nu * nu - mu * mu) / 2
        return -k * k * (a / ch ** 2 + 1j * b * sh / ch ** 2)


@dataclass(frozen=True)
class SquareWell(PotentialSpec):
    """Asymmetric complex well: V0 + i Vi1 on [-a, 0), V0 + i Vi2 on [0, b).

    V vanishes outside [-a, b); steps are right-continuous.
    """

    a: float = 3.0
    b: float = 4.2762
    V0: float = -1.0
    Vi1: float = -0.2
    Vi2: float = 0.1
    family: ClassVar[str] = "SquareWell"

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("SquareWell requires a >= 0 and b >= 0")

    @property
    def support(self):
        return (-self.a, self.b)

    @property
    def breakpoints(self):
        return tuple(sorted({-self.a, 0.0, self.b}))

    @property
    def interaction_zone(self):
        return (-self.a, self.b)

    @property
    def outside_value(self):
        return 0j

    def _eval(self, x):
        left = _step(x + self.a) - _step(x)
        right = _step(x) - _step(x - self.b)
        return self.V0 * (left + right) + 1j * (self.Vi1 * left + self.Vi2 * right)


@dataclass(frozen=True)
class DarbouxOscillator(PotentialSpec):
    """Complex Darboux partner of x^2 at factorization energy -1.

    `form` picks the constant term of the Ermakov radicand, see
    `interlace.darboux.ALPHA_FORMS`.
    """

    c0: float = 2.0
    c1: float = 0.0
    lam: float = 1.7
    form: str = "general"
    family: ClassVar[str] = "DarbouxOscillator"

    def __post_init__(self):
        from .darboux import check_oscillator_radicand
        check_oscillator_radicand(self.c0, self.c1, self.lam, self.form)

    def params(self) -> dict:
        return {"c0": self.c0, "c1": self.c1, "lambda": self.lam, "form": self.form}

    def _eval(self, x):
        from .darboux import oscillator_alpha_terms
        t = oscillator_alpha_terms(x, self.c0, self.c1, self.lam, self.form)
        return t.potential()


@dataclass(frozen=True, eq=False)
class Sampled(PotentialSpec):
    """Potential given by samples on a grid, linearly interpolated."""

    grid: Grid = None
    values: NDArray = field(default=None, repr=False)
    family: ClassVar[str] = "Sampled"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if self.grid is None or v.shape != (self.grid.n_points,):
            raise ValueError("Sampled potential needs one value per grid point")
        object.__setattr__(self, "values", v)

    def params(self) -> dict:
        return {**self.grid.to_dict(), "re": self.values.real.tolist(),
                "im": self.values.imag.tolist()}

    def _eval(self, x):
        lo, hi = self.grid.x_min, self.grid.x_max
        tol = 1e-12 * self.grid.width
        if np.any((x < lo - tol) | (x > hi + tol)):
            raise ValueError(f"Sampled potential evaluated outside [{lo}, {hi}]")
        xs = self.grid.x
        return np.interp(x, xs, self.values.real) + 1j * np.interp(x, xs, self.values.imag)


FAMILIES = {c.family: c for c in
            (PoschlTeller, SinusoidalWell, CubicOscillator, Levai, SquareWell,
             DarbouxOscillator, Sampled)}

# parameter names used in the JSON form, in catalog order
PARAM_NAMES = {
    "PoschlTeller": ("kappa",),
    "SinusoidalWell": ("W0", "V0"),
    "CubicOscillator": (),
    "Levai": ("nu", "mu", "eps", "kappa"),
    "SquareWell": ("a", "b", "V0", "Vi1", "Vi2"),
    "DarbouxOscillator": ("c0", "c1", "lambda"),
}


def eval_potential(spec: PotentialSpec, x: ArrayLike):
    """Evaluate V(x) for a scalar or array of real points."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    return spec(x)


# --- classification ---------------------------------------------------------

@dataclass(frozen=True)
class ClassLabel:
    kind: str  # "ContinuousClass", "ShortRangeClass" or "Neither"
    x0: float | None = None
    sign_changes: tuple = ()
    jumps: tuple = ()


def _sign_changes(x, y, floor):
    """Indices (i, j) of consecutive significant samples with opposite sign."""
    idx = np.flatnonzero(np.abs(y) > floor)
    if idx.size < 2:
        return []
    s = np.sign(y[idx])
    flips = np.flatnonzero(s[1:] != s[:-1])
    return [(idx[k], idx[k + 1]) for k in flips]


def classify(spec: PotentialSpec, grid: Grid, tol: float = 10.0) -> ClassLabel:
    """Decide between the continuous and short-range classes.

    `tol` multiplies the local slope estimate in the jump test: a step of
    V_I between neighbours is a discontinuity when it exceeds tol times the
    larger adjacent step.
    """
    x = grid.x
    vi = np.imag(spec(x))
    scale = np.max(np.abs(vi))
    if scale == 0:
        return ClassLabel("Neither")
    floor = 1e-12 * scale
    d = np.abs(np.diff(vi))
    nb = np.maximum(np.r_[0.0, d[:-1]], np.r_[d[1:], 0.0])
    jumps = tuple(float(x[i] + x[i + 1]) / 2 for i in np.flatnonzero(d > tol * nb + floor))

    brackets = _sign_changes(x, vi, floor)
    if spec.support is not None:
        lo, hi = spec.support
        brackets = [(i, j) for i, j in brackets if x[i] >= lo - grid.h and x[j] <= hi + grid.h]
    points = []
    for i, j in brackets:
        f = lambda t: float(np.imag(spec(t)))
        try:
            points.append(brentq(f, x[i], x[j], xtol=1e-13))
        except ValueError:
            points.append(0.5 * (x[i] + x[j]))
    points = tuple(points)
    if len(points) != 1:
        return ClassLabel("Neither", None, points, jumps)
    if spec.support is not None:
        return ClassLabel("ShortRangeClass", points[0], points, jumps)
    if jumps:
        return ClassLabel("Neither", None, points, jumps)
    return ClassLabel("ContinuousClass", points[0], points, jumps)


def pt_check(spec: PotentialSpec, grid: Grid, tol: float = 1e-12, center: float = 0.0) -> bool:
    """True iff max |V(x) - conj V(2c - x)| <= tol on a grid symmetric about c."""
    if not grid.is_symmetric(center):
        raise ValueError("pt_check needs a grid symmetric about the reflection center")
    x = grid.x
    v = spec(x)
    vm = spec(2 * center - x)
    scale = max(1.0, float(np.max(np.abs(v))))
    return bool(np.max(np.abs(v - np.conj(vm))) <= tol * scale)


class AreaResult(NamedTuple):
    value: float
    converged: bool


def zero_total_area(spec: PotentialSpec, grid: Grid, decay_tol: float = 1e-8) -> AreaResult:
    """Integral of V_I over the grid by composite Simpson.

    Compact-support families are integrated piecewise between their
    breakpoints so kinks and steps sit on nodes. `converged` is False
    when V_I has not decayed at the grid ends.
    """
    if isinstance(spec, SquareWell):
        a = min(spec.a, -grid.x_min) if grid.x_min < 0 else 0.0
        b = min(spec.b, grid.x_max) if grid.x_max > 0 else 0.0
        return AreaResult(spec.Vi1 * max(a, 0.0) + spec.Vi2 * max(b, 0.0), True)
    x = grid.x
    vi = np.imag(spec(x))
    scale = float(np.max(np.abs(vi))) or 1.0
    converged = bool(max(abs(vi[0]), abs(vi[-1])) <= decay_tol * scale)
    cuts = [p for p in spec.breakpoints if grid.x_min < p < grid.x_max]
    edges = [grid.x_min, *cuts, grid.x_max]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = max(3, int(round((hi - lo) / grid.h)) + 1)
        n += (n + 1) % 2  # odd count keeps Simpson exact order
        xs = np.linspace(lo, hi, n)
        # evaluate just inside each piece so one-sided limits are used
        eps = 1e-12 * (hi - lo)
        xs_eval = np.clip(xs, lo + eps, hi - eps)
        total += simpson(np.imag(spec(xs_eval)), x=xs)
    return AreaResult(float(total), converged)


# --- JSON form --------------------------------------------------------------

def _encode(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def _decode(v):
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    return v


def spec_to_dict(spec: PotentialSpec) -> dict:
    return {"family": spec.family, "params": {k: _encode(v) for k, v in spec.params().items()}}


def spec_from_dict(doc: dict) -> PotentialSpec:
    try:
        family = doc["family"]
        cls = FAMILIES[family]
    except KeyError as exc:
        raise ValueError(f"unknown potential family: {doc.get('family')!r}") from exc
    params = dict(doc.get("params", {}))
    if cls is Sampled:
        grid = Grid(params["x_min"], params["x_max"], params["n_points"])
        values = np.asarray(params["re"], float) + 1j * np.asarray(params["im"], float)
        return Sampled(grid, values)
    if cls is DarbouxOscillator and "lambda" in params:
        params["lam"] = params.pop("lambda")
    kw = {}
    for k, v in params.items():
        v = _decode(v)
        if cls is not Levai and isinstance(v, complex):
            if v.imag != 0:
                raise ValueError(f"parameter {k} of {family} must be real")
            v = v.real
        kw[k] = v
    try:
        return cls(**kw)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {family}: {exc}") from exc
