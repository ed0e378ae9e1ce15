"""Complex Darboux partners of real seed potentials.

The construction factorizes the seed Hamiltonian h = -d^2 + theta at an
energy E0 below its ground level through the complex superpotential

    beta = -alpha'/alpha + i s / alpha^2,

where alpha > 0 is the Ermakov function built from two real seed solutions
at E0. beta solves the Riccati equation -beta' + beta^2 = theta - E0 when
s^2 equals the Ermakov invariant of alpha, which is lambda for the
coefficient choice c = (lambda + c1^2)/c0. The partner potential is
V = theta + 2 beta', with eigenfunctions phi_n' + beta phi_n at the seed
energies plus the extra ground state exp(int beta) at E0.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import NDArray
from scipy.interpolate import CubicSpline
from scipy.special import erf

from .grid import Grid
from .potentials import DarbouxOscillator, PotentialSpec, Sampled
from .wavefunction import Raw, WaveFunction, normalize

__all__ = [
    "ALPHA_FORMS", "SeedSpec", "OSCILLATOR_SEED", "ErmakovAlpha", "Superpotential",
    "DarbouxFamily", "RadicandError", "NonNormalizableError",
    "seed_oscillator_state", "ermakov_alpha", "superpotential", "darboux_potential",
    "partner_state", "missing_state", "riccati_residual", "build_family",
    "oscillator_alpha_terms", "check_oscillator_radicand",
]

log = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)

# Constant term of the radicand, c = K(c0, c1, lambda).
ALPHA_FORMS = {
    # Ermakov invariant equals lambda for every c1; chosen by the residual oracle
    "general": lambda c0, c1, lam: (lam + c1 * c1) / c0,
    # constant printed for the oscillator seed; agrees with "general" for c1 in {0, 1}
    "oscillator": lambda c0, c1, lam: (c1 + lam) / c0,
}


class RadicandError(ValueError):
    """alpha^2 is not strictly positive; `x` holds the offending point."""

    def __init__(self, msg, x=None):
        super().__init__(msg)
        self.x = x


class NonNormalizableError(ValueError):
    pass


def _constant_term(c0, c1, lam, form):
    if c0 == 0:
        raise RadicandError("c0 must be nonzero")
    if lam < 0:
        raise RadicandError("lambda must be non-negative for a real Ermakov strength")
    try:
        return ALPHA_FORMS[form](c0, c1, lam)
    except KeyError:
        raise ValueError(f"unknown alpha form {form!r}; choose from {sorted(ALPHA_FORMS)}") from None


# --- oscillator seed in closed form ------------------------------------------

def check_oscillator_radicand(c0, c1, lam, form="general"):
    """Check Q(u) = (pi c0/4) u^2 + sqrt(pi) c1 u + K > 0 for u = erf(x) in [-1, 1].

    Positivity over the whole erf range covers every real x at once.
    """
    K = _constant_term(c0, c1, lam, form)
    if c0 * K - c1 * c1 < 0:
        raise RadicandError(f"Ermakov invariant c0*c - c1^2 = {c0 * K - c1 * c1:.6g} is negative "
                            f"for form {form!r}")
    A, B = math.pi * c0 / 4, SQRT_PI * c1
    cand = [-1.0, 1.0]
    if A != 0 and -1 < -B / (2 * A) < 1:
        cand.append(-B / (2 * A))
    for u in cand:
        if A * u * u + B * u + K <= 0:
            x = float(np.clip(_erfinv(u), -1e300, 1e300))
            raise RadicandError(f"alpha^2 <= 0 near x = {x:.6g} (erf = {u:.6g})", x)
    return K


def _erfinv(u):
    from scipy.special import erfinv
    return erfinv(u)


@dataclass(frozen=True, eq=False)
class AlphaTerms:
    """log-derivatives of g = alpha^2 and 1/g, sampled at x.

    r1 = g'/g, r2 = g''/g, inv_g = 1/alpha^2; s is the Ermakov strength.
    """

    x: NDArray
    r1: NDArray
    r2: NDArray
    inv_g: NDArray
    s: float
    theta: NDArray
    E0: float

    def alpha(self):
        return 1.0 / np.sqrt(self.inv_g)

    def dalpha(self):
        return 0.5 * self.r1 * self.alpha()

    def beta(self):
        return -0.5 * self.r1 + 1j * self.s * self.inv_g

    def dbeta(self):
        return -0.5 * (self.r2 - self.r1 ** 2) - 1j * self.s * self.r1 * self.inv_g

    def potential(self):
        # V = theta + 2 beta'
        return self.theta - (self.r2 - self.r1 ** 2) - 2j * self.s * self.r1 * self.inv_g


def oscillator_alpha_terms(x, c0, c1, lam, form="general") -> AlphaTerms:
    """Closed-form alpha for theta = x^2, E0 = -1.

    alpha^2 = e^{x^2} Q(erf x); all derivatives are exact, written so that
    no e^{x^2} factor is formed explicitly.
    """
    x = np.asarray(x, dtype=float)
    K = _constant_term(c0, c1, lam, form)
    A, B = math.pi * c0 / 4, SQRT_PI * c1
    u = erf(x)
    Q = (A * u + B) * u + K
    e1 = np.exp(-x * x)
    r1 = 2 * x + (2 / SQRT_PI) * (2 * A * u + B) * e1 / Q
    r2 = 2 + 2 * x * r1 + (8 * A / math.pi) * e1 * e1 / Q
    return AlphaTerms(x, r1, r2, e1 / Q, math.sqrt(c0 * K - c1 * c1), x * x, -1.0)


# --- seeds -------------------------------------------------------------------

def seed_oscillator_state(n: int, x) -> tuple[float, NDArray, NDArray]:
    """Normalized Hermite function of x^2: (2n+1, phi_n, phi_n')."""
    if not (0 <= n <= 30) or int(n) != n:
        raise ValueError("oscillator seed levels are limited to 0 <= n <= 30")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.pi ** -0.25 * np.exp(-x * x / 2)
    for k in range(n):
        prev, cur = cur, math.sqrt(2 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
    dphi = math.sqrt(2 * n) * prev - x * cur
    return 2 * n + 1.0, cur, dphi


@dataclass(frozen=True)
class SeedSpec:
    """Real seed potential with known eigenpairs and a factorization energy.

    `states(n, x)` returns (energy, phi_n, phi_n') on the points x.
    """

    theta: Callable = field(repr=False)
    states: Callable = field(repr=False)
    E0: float
    name: str = "custom"

    def level(self, n, x):
        return self.states(n, x)


OSCILLATOR_SEED = SeedSpec(lambda x: np.asarray(x, float) ** 2, seed_oscillator_state, -1.0,
                           "oscillator")


class _SeedPotential(PotentialSpec):
    family = "Seed"

    def __init__(self, theta):
        self._theta = theta

    def _eval(self, x):
        return np.asarray(self._theta(x), dtype=complex)


# --- alpha, beta, V ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ErmakovAlpha:
    grid: Grid
    alpha: NDArray
    dalpha: NDArray
    terms: AlphaTerms = field(repr=False)
    c0: float
    c1: float
    lam: float
    form: str
    path: str  # "closed" or "general"
    E0: float
    seed: SeedSpec = field(repr=False, default=OSCILLATOR_SEED)
    z: NDArray | None = field(repr=False, default=None)
    v: NDArray | None = field(repr=False, default=None)
    w0: float | None = None

    @property
    def strength(self) -> float:
        return self.terms.s

    def sign_changes_of_derivative(self) -> list[float]:
        from .analysis import find_zeros
        return find_zeros(self.grid.x, self.terms.r1).zeros


def _general_terms(seed: SeedSpec, grid: Grid, c0, c1, lam, form):
    """alpha^2 = a v^2 + b v z + c z^2 from seed solutions at E0.

    z(x_ref) = 1, z'(x_ref) = 0 and v(x_ref) = 0, v'(x_ref) = 1 with x_ref the
    grid midpoint; w0 = z v' - z' v.
    """
    from .solver import integrate_on_grid

    x = grid.x
    E0 = seed.E0
    mid = grid.n_points // 2
    spec = _SeedPotential(seed.theta)
    psi0 = np.array([1.0, 0.0], complex)
    dpsi0 = np.array([0.0, 1.0], complex)
    E = np.array([E0, E0], complex)
    psi, dpsi = integrate_on_grid(spec, E, grid, mid, psi0, dpsi0)
    z, v = psi[:, 0].real, psi[:, 1].real
    dz, dv = dpsi[:, 0].real, dpsi[:, 1].real
    w0 = float(z[mid] * dv[mid] - dz[mid] * v[mid])
    K = _constant_term(c0, c1, lam, form)
    a, b, c = c0 / w0 ** 2, 2 * c1 / w0, K
    q = np.asarray(seed.theta(x), float) - E0
    g = a * v * v + b * v * z + c * z * z
    if np.any(g <= 0):
        i = int(np.argmin(g))
        raise RadicandError(f"alpha^2 <= 0 near x = {x[i]:.6g}", float(x[i]))
    g1 = 2 * a * v * dv + b * (dv * z + v * dz) + 2 * c * z * dz
    g2 = 2 * a * (dv * dv + q * v * v) + b * (2 * dv * dz + 2 * q * v * z) + 2 * c * (dz * dz + q * z * z)
    s = math.sqrt((a * c - b * b / 4) * w0 * w0)
    terms = AlphaTerms(x, g1 / g, g2 / g, 1.0 / g, s, np.asarray(seed.theta(x), float), E0)
    return terms, z, v, w0


def ermakov_alpha(seed: SeedSpec, lam: float, c0: float, c1: float, grid: Grid,
                  form: str = "general", path: str = "auto") -> ErmakovAlpha:
    """Positive Ermakov function on the grid.

    path="closed" uses the erf form (oscillator seed at E0 = -1 only),
    "general" integrates the seed pair numerically, "auto" prefers closed.
    """
    if path == "auto":
        path = "closed" if seed.name == "oscillator" and seed.E0 == -1.0 else "general"
    z = v = w0 = None
    if path == "closed":
        if seed.name != "oscillator" or seed.E0 != -1.0:
            raise ValueError("closed form exists only for the oscillator seed at E0 = -1")
        check_oscillator_radicand(c0, c1, lam, form)
        terms = oscillator_alpha_terms(grid.x, c0, c1, lam, form)
    elif path == "general":
        _constant_term(c0, c1, lam, form)
        terms, z, v, w0 = _general_terms(seed, grid, c0, c1, lam, form)
    else:
        raise ValueError(f"unknown path {path!r}")
    al = ErmakovAlpha(grid, terms.alpha(), terms.dalpha(), terms, c0, c1, lam, form, path,
                      seed.E0, seed, z, v, w0)
    turns = al.sign_changes_of_derivative()
    if len(turns) != 1:
        log.warning("alpha' changes sign %d times (at %s); V_I is outside the continuous class",
                    len(turns), ", ".join(f"{t:.4g}" for t in turns))
    return al


@dataclass(frozen=True, eq=False)
class Superpotential:
    grid: Grid
    beta: NDArray
    dbeta: NDArray
    lam: float
    strength: float
    theta: NDArray = field(repr=False)
    E0: float = -1.0
    inv_g: NDArray | None = field(repr=False, default=None)  # 1/alpha^2


def superpotential(alpha: ErmakovAlpha) -> Superpotential:
    t = alpha.terms
    return Superpotential(alpha.grid, t.beta(), t.dbeta(), alpha.lam, t.s, t.theta, alpha.E0,
                          t.inv_g)


def riccati_residual(sp: Superpotential) -> float:
    """max |-beta' + beta^2 - (theta - E0)| on the grid."""
    return float(np.max(np.abs(-sp.dbeta + sp.beta ** 2 - (sp.theta - sp.E0))))


def darboux_potential(seed: SeedSpec, alpha: ErmakovAlpha) -> PotentialSpec:
    """V = theta + 2 beta' as a closed-form or sampled spec.

    Also asserts that V_I vanishes at the zeros of alpha'.
    """
    t = alpha.terms
    v = t.potential()
    zeros = alpha.sign_changes_of_derivative()
    if zeros:
        x = alpha.grid.x
        vi_at = np.interp(zeros, x, v.imag)
        if np.max(np.abs(vi_at)) > 1e-6 * max(1.0, float(np.max(np.abs(v.imag)))):
            raise AssertionError("zeros of alpha' are not zeros of V_I")
    if alpha.path == "closed":
        return DarbouxOscillator(alpha.c0, alpha.c1, alpha.lam, alpha.form)
    return Sampled(alpha.grid, v)


def partner_state(phi: NDArray, dphi: NDArray, energy: float, sp: Superpotential) -> WaveFunction:
    """psi = C (phi' + beta phi) with C > 0, normalized, at the seed energy."""
    psi = dphi + sp.beta * phi
    # psi'' = (theta - E) phi + beta' phi + beta phi'
    dpsi = (sp.theta - energy) * phi + sp.dbeta * phi + sp.beta * dphi
    wf = WaveFunction(sp.grid, psi, dpsi, float(energy), phase_rule=Raw(0.0))
    return normalize(wf)


def missing_state(sp: Superpotential, tail_tol: float = 1e-6) -> WaveFunction:
    """Extra ground state exp(int_mid^x beta) at E0.

    Re beta = -alpha'/alpha integrates exactly to 1/alpha; the phase
    s int 1/alpha^2 comes from a cubic-spline antiderivative, which is smooth
    from point to point (cumulative Simpson alternates its error between
    even and odd nodes and that sawtooth shows up in psi'').
    """
    x = sp.grid.x
    mid = sp.grid.n_points // 2
    if sp.inv_g is not None:
        logmag = 0.5 * np.log(sp.inv_g)
        phase = CubicSpline(x, sp.strength * sp.inv_g).antiderivative()(x)
    else:
        logmag = CubicSpline(x, sp.beta.real).antiderivative()(x)
        phase = CubicSpline(x, sp.beta.imag).antiderivative()(x)
    logmag = logmag - logmag[mid]
    phase = phase - phase[mid]
    psi = np.exp(logmag - logmag.max() + 1j * phase)
    amp = np.abs(psi)
    if max(amp[0], amp[-1]) > tail_tol * amp.max():
        raise NonNormalizableError("missing state does not decay at the grid ends")
    wf = WaveFunction(sp.grid, psi, sp.beta * psi, float(sp.E0), phase_rule=Raw(0.0))
    return normalize(wf)


# --- assembled families ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DarbouxFamily:
    alpha: ErmakovAlpha
    superpotential: Superpotential
    potential: PotentialSpec
    states: list  # psi_0 (missing), psi_1, ..., psi_levels
    energies: list
    riccati: float
    intertwining: list

    @property
    def grid(self):
        return self.alpha.grid


def build_family(c0: float, c1: float, lam: float, levels: int = 5, grid: Grid | None = None,
                 form: str = "general", seed: SeedSpec = OSCILLATOR_SEED,
                 path: str = "auto") -> DarbouxFamily:
    """Potential plus states psi_0..psi_levels for the oscillator seed."""
    from .analysis import residual_oracle

    if grid is None:
        grid = Grid(-10.0, 10.0, 20001)
    al = ermakov_alpha(seed, lam, c0, c1, grid, form=form, path=path)
    sp = superpotential(al)
    pot = darboux_potential(seed, al)
    states = [missing_state(sp)]
    for n in range(levels):
        En, phi, dphi = seed.level(n, grid.x)
        states.append(partner_state(phi, dphi, En, sp))
    vx = al.terms.potential()
    inter = [residual_oracle(vx, wf, wf.energy, exclude=()) for wf in states]
    return DarbouxFamily(al, sp, pot, states, [wf.energy for wf in states],
                         riccati_residual(sp), inter)
