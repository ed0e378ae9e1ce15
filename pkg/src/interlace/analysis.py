"""Zeros, interlacing, Wronskian and density diagnostics of eigenstates."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from .potentials import PotentialSpec
from .wavefunction import WaveFunction

__all__ = [
    "Zeros", "ZeroReport", "WronskianDiagnostics", "DensityProfile",
    "find_zeros", "interlacing_check", "count_law_check", "zero_report",
    "wronskian_diagnostics", "density_profile", "residual_oracle", "phase_sweep",
    "second_difference", "state_report", "wronskian",
]

log = logging.getLogger(__name__)

# relative size below which a component sample counts as numerically zero
NOISE = 1e-10


class Zeros(NamedTuple):
    zeros: list
    boundary: list  # crossings within 2h of the grid ends, excluded from `zeros`


def _hermite_root(x0, x1, y0, y1, d0, d1, tol):
    hh = x1 - x0

    def p(t):
        s = (t - x0) / hh
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * y0 + h10 * hh * d0 + h01 * y1 + h11 * hh * d1

    if p(x0) * p(x1) > 0:
        return x0 - y0 * hh / (y1 - y0)
    return brentq(p, x0, x1, xtol=tol, rtol=4 * np.finfo(float).eps)


def _cubic_root(xs, ys, i, tol):
    """Root in [xs[i], xs[i+1]] of the cubic through four neighbouring samples."""
    lo = min(max(i - 1, 0), xs.size - 4)
    px, py = xs[lo:lo + 4], ys[lo:lo + 4]

    def p(t):
        tot = 0.0
        for a in range(4):
            w = 1.0
            for b in range(4):
                if a != b:
                    w *= (t - px[b]) / (px[a] - px[b])
            tot += w * py[a]
        return tot

    x0, x1 = xs[i], xs[i + 1]
    if p(x0) * p(x1) > 0:
        return x0 - ys[i] * (x1 - x0) / (ys[i + 1] - ys[i])
    return brentq(p, x0, x1, xtol=tol, rtol=4 * np.finfo(float).eps)


def find_zeros(x: NDArray, y: NDArray, dy: NDArray | None = None, refine_tol: float = 1e-10,
               scale: NDArray | float | None = None, edge: float | None = None) -> Zeros:
    """Sign changes of sampled y, refined to refine_tol.

    Refinement uses the cubic Hermite interpolant when derivative samples
    are given and a local four-point cubic otherwise. Samples with
    |y| <= 1e-10 * scale (scale defaults to 0) are treated as zero, so exact
    zeros on nodes and roundoff-level flicker are handled; tangential zeros
    do not change sign and are ignored. Crossings within `edge`
    (default 2h) of the grid ends are reported separately.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.size < 2:
        return Zeros([], [])
    floor = 0.0 if scale is None else NOISE * np.broadcast_to(np.asarray(scale, float), y.shape)
    sig = np.flatnonzero(np.abs(y) > floor)
    out = []
    if sig.size >= 2:
        s = np.sign(y[sig])
        for k in np.flatnonzero(s[1:] != s[:-1]):
            i, j = sig[k], sig[k + 1]
            if j == i + 1:
                if dy is not None:
                    r = _hermite_root(x[i], x[j], y[i], y[j], dy[i], dy[j], refine_tol)
                elif x.size >= 4:
                    r = _cubic_root(x, y, i, refine_tol)
                else:
                    r = x[i] - y[i] * (x[j] - x[i]) / (y[j] - y[i])
            else:
                # one or more negligible samples in between: centre of that run
                r = 0.5 * (x[i + 1] + x[j - 1])
            out.append(float(r))
    h = (x[-1] - x[0]) / (x.size - 1)
    edge = 2 * h if edge is None else edge
    inner = [r for r in out if x[0] + edge < r < x[-1] - edge]
    bnd = [r for r in out if not (x[0] + edge < r < x[-1] - edge)]
    return Zeros(inner, bnd)


def interlacing_check(lambdas, mus, merge_tol: float = 1e-8):
    """Strict alternation of the merged zero sequence, no near-coincidences.

    Returns (ok, violations); each violation is a tuple
    (kind_a, x_a, kind_b, x_b, reason) for an offending adjacent pair.
    """
    seq = sorted([(float(v), "lambda") for v in lambdas] + [(float(v), "mu") for v in mus])
    bad = []
    for (xa, ka), (xb, kb) in zip(seq[:-1], seq[1:]):
        if ka != kb and abs(xb - xa) <= merge_tol:
            bad.append((ka, xa, kb, xb, "coincident"))
        elif ka == kb:
            bad.append((ka, xa, kb, xb, "same kind adjacent"))
    return not bad, bad


def count_law_check(n_R: int, n_I: int) -> bool:
    return abs(int(n_R) - int(n_I)) <= 1


@dataclass(frozen=True)
class ZeroReport:
    lambdas: list
    mus: list
    n_R: int
    n_I: int
    interlaced: bool
    first_kind: str | None  # "LambdaFirst", "MuFirst" or None without zeros
    phase: str
    violations: list = field(default_factory=list)
    boundary: list = field(default_factory=list)

    @property
    def count_law(self) -> bool:
        return count_law_check(self.n_R, self.n_I)


def zero_report(wf: WaveFunction, merge_tol: float | None = None,
                refine_tol: float = 1e-10) -> ZeroReport:
    x = wf.x
    amp = np.abs(wf.psi)
    zr = find_zeros(x, wf.psi.real, wf.dpsi.real, refine_tol, scale=amp)
    zi = find_zeros(x, wf.psi.imag, wf.dpsi.imag, refine_tol, scale=amp)
    tol = 1e-8 * wf.grid.width if merge_tol is None else merge_tol
    ok, bad = interlacing_check(zr.zeros, zi.zeros, tol)
    first = None
    if zr.zeros or zi.zeros:
        lf = zr.zeros[0] if zr.zeros else np.inf
        mf = zi.zeros[0] if zi.zeros else np.inf
        first = "LambdaFirst" if lf < mf else "MuFirst"
    return ZeroReport(zr.zeros, zi.zeros, len(zr.zeros), len(zi.zeros), ok, first,
                      str(wf.phase_rule), bad, zr.boundary + zi.boundary)


def phase_sweep(wf: WaveFunction, n: int = 32) -> list:
    """Zero reports of e^{i theta} psi for n phases uniformly spaced in [0, pi)."""
    return [zero_report(wf.rotated(t)) for t in np.arange(n) * np.pi / n]


# --- finite differences and residuals -----------------------------------------

def second_difference(y: NDArray, h: float) -> NDArray:
    """Five-point second derivative at interior points 2..n-3."""
    return (-y[:-4] + 16 * y[1:-3] - 30 * y[2:-2] + 16 * y[3:-1] - y[4:]) / (12 * h * h)


def first_difference(y: NDArray, h: float) -> NDArray:
    """Five-point first derivative at interior points 2..n-3."""
    return (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)


def _stencil_mask(x: NDArray, exclude) -> NDArray:
    """Interior points whose 5-point stencil does not straddle an excluded point."""
    xi = x[2:-2]
    h = x[1] - x[0]
    ok = np.ones(xi.size, bool)
    for p in exclude or ():
        ok &= np.abs(xi - p) > 2 * h + 1e-12
    return ok


def _potential_samples(spec, x):
    if isinstance(spec, PotentialSpec):
        return np.asarray(spec(x), complex)
    v = np.asarray(spec, complex)
    if v.shape != x.shape:
        raise ValueError("potential samples must match the grid")
    return v


def residual_oracle(spec, wf: WaveFunction, E: float, exclude=None) -> float:
    """sup |-psi'' + (V - E) psi| / max|psi| over interior points.

    `spec` may be a PotentialSpec or an array of V samples on the grid.
    Stencils straddling points in `exclude` (potential discontinuities) are
    skipped. A zero function gives 0.
    """
    x = wf.x
    amp = float(np.max(np.abs(wf.psi)))
    if amp == 0:
        log.warning("residual of the zero function is degenerate")
        return 0.0
    v = _potential_samples(spec, x)
    if exclude is None and isinstance(spec, PotentialSpec):
        exclude = spec.breakpoints
    r = -second_difference(wf.psi, wf.grid.h) + (v[2:-2] - E) * wf.psi[2:-2]
    r = np.abs(r)[_stencil_mask(x, exclude)]
    return float(r.max() / amp) if r.size else 0.0


# --- Wronskian -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WronskianDiagnostics:
    W: NDArray = field(repr=False)
    x0: float | None  # location of the extremum of W
    sign: str  # "+", "-", "mixed" or "zero"
    residual: float  # max |W' + rho V_I|
    nonvanishing: bool
    monotone: bool
    x0_expected: float | None = None


def wronskian(wf: WaveFunction) -> NDArray:
    """W[psi_R, psi_I] = psi_R' psi_I - psi_R psi_I'."""
    return wf.dpsi.real * wf.psi.imag - wf.psi.real * wf.dpsi.imag


def wronskian_diagnostics(wf: WaveFunction, spec, bulk_tol: float = 1e-4,
                          x0_expected: float | None = None, exclude=None) -> WronskianDiagnostics:
    """Sign, extremum and identity residual of W[psi_R, psi_I].

    The identity checked is W' = -|psi|^2 V_I, which follows from
    psi'' = (V - E) psi. Sign constancy and |W| > 1e-10 max|W| are tested
    on the bulk where rho >= bulk_tol * max rho; outside the support of a
    short-range V_I, W vanishes identically and is skipped.
    """
    x = wf.x
    h = wf.grid.h
    W = wronskian(wf)
    v = _potential_samples(spec, x)
    rho = wf.rho
    if exclude is None and isinstance(spec, PotentialSpec):
        exclude = spec.breakpoints
    dW = first_difference(W, h)
    res = np.abs(dW + rho[2:-2] * v.imag[2:-2])[_stencil_mask(x, exclude)]
    residual = float(res.max()) if res.size else 0.0

    wmax = float(np.max(np.abs(W)))
    if wmax == 0:
        log.warning("W vanishes identically (real state up to phase)")
        return WronskianDiagnostics(W, None, "zero", residual, False, False, x0_expected)
    bulk = rho >= bulk_tol * rho.max()
    support = getattr(spec, "support", None)
    if support is not None:
        bulk &= (x > support[0] + 2 * h) & (x < support[1] - 2 * h)
    wb = W[bulk]
    # |W| is compared with max|W| only across the oscillating core (hull of
    # the zeros of psi_R, psi_I and the density maxima): beyond it W is an
    # integral of rho V_I over a tail and can be legitimately tiny when V_I
    # decays faster than rho
    zr = zero_report(wf)
    pts = zr.lambdas + zr.mus + [m[0] for m in density_profile(wf).maxima]
    core = bulk & (x >= min(pts)) & (x <= max(pts)) if pts else bulk
    nonvanishing = bool(np.all(np.abs(W[core]) > 1e-10 * wmax))
    if np.all(wb > 0):
        sign = "+"
    elif np.all(wb < 0):
        sign = "-"
    else:
        sign = "mixed"
    i = int(np.argmax(np.abs(W)))
    x0 = float(x[i])
    if 0 < i < x.size - 1:
        a, b, c = np.abs(W[i - 1:i + 2])
        den = a - 2 * b + c
        if den != 0:
            x0 = float(x[i] + 0.5 * h * (a - c) / den)
    # |W| grows up to x0 and decays after it (within the bulk)
    aw = np.abs(W)
    d = np.diff(aw)
    xb = 0.5 * (x[1:] + x[:-1])
    inb = bulk[1:] & bulk[:-1]
    noise = 1e-9 * wmax
    monotone = bool(np.all(d[inb & (xb < x0 - 2 * h)] >= -noise)
                    and np.all(d[inb & (xb > x0 + 2 * h)] <= noise))
    return WronskianDiagnostics(W, x0, sign, residual, nonvanishing, monotone, x0_expected)


# --- density -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DensityProfile:
    rho: NDArray = field(repr=False)
    maxima: list  # (x, rho) pairs
    minima: list
    min_rho: float  # min of rho / max rho over the interior span
    span: tuple

    @property
    def n_maxima(self):
        return len(self.maxima)


def density_profile(wf: WaveFunction, floor: float = 1e-8) -> DensityProfile:
    """Extrema of rho from sign changes of its forward differences.

    Extrema where rho < floor * max rho (decayed tails) are ignored. The
    interior span runs between the outermost points with rho >= floor * max;
    min_rho is the smallest sampled or refined-minimum value there over max rho.
    """
    x, h = wf.x, wf.grid.h
    rho = wf.rho
    top = float(rho.max())
    d = np.diff(rho)
    maxima, minima = [], []
    s = np.sign(d)
    for i in np.flatnonzero(s[:-1] * s[1:] < 0) + 1:
        if rho[i] < floor * top:
            continue
        a, b, c = rho[i - 1], rho[i], rho[i + 1]
        den = a - 2 * b + c
        off = 0.5 * (a - c) / den if den != 0 else 0.0
        xe = float(x[i] + off * h)
        ve = float(b - 0.25 * (a - c) * off)
        (maxima if d[i - 1] > 0 else minima).append((xe, ve))
    keep = np.flatnonzero(rho >= floor * top)
    lo, hi = keep[0], keep[-1]
    # refined minima catch a node falling between two samples
    low = min([float(rho[lo:hi + 1].min())] + [v for _, v in minima])
    return DensityProfile(rho, maxima, minima, low / top, (float(x[lo]), float(x[hi])))


# --- combined report -------------------------------------------------------------

NODELESS_TOL = 1e-12


def state_report(wf: WaveFunction, spec=None, sweep: int = 0) -> dict:
    """Zero, Wronskian and density diagnostics of one state as a plain dict.

    Without a potential the Wronskian identity residual is reported as None.
    """
    zr = zero_report(wf)
    dens = density_profile(wf)
    W = wronskian(wf)
    doc = {
        "energy": wf.energy, "phase_rule": str(wf.phase_rule),
        "lambdas": zr.lambdas, "mus": zr.mus, "n_R": zr.n_R, "n_I": zr.n_I,
        "interlaced": zr.interlaced, "count_law": zr.count_law, "first_kind": zr.first_kind,
        "violations": [list(v) for v in zr.violations], "boundary_zeros": zr.boundary,
        "density": {"maxima": [list(m) for m in dens.maxima], "minima": [list(m) for m in dens.minima],
                    "n_maxima": dens.n_maxima, "min_rho_rel": dens.min_rho,
                    "nodeless": dens.min_rho > NODELESS_TOL},
    }
    if spec is not None:
        wd = wronskian_diagnostics(wf, spec)
        doc["wronskian"] = {"sign": wd.sign, "residual": wd.residual, "nonvanishing": wd.nonvanishing,
                            "monotone": wd.monotone, "x_extremum": wd.x0}
    else:
        aw = np.abs(W)
        doc["wronskian"] = {"sign": "+" if np.all(W > 0) else "-" if np.all(W < 0) else "mixed",
                            "residual": None, "nonvanishing": None, "monotone": None,
                            "x_extremum": float(wf.x[int(np.argmax(aw))])}
    if sweep:
        reps = phase_sweep(wf, sweep)
        doc["phase_sweep"] = {"n": sweep, "interlaced": sum(r.interlaced for r in reps),
                              "count_law": sum(r.count_law for r in reps),
                              "counts": [[r.n_R, r.n_I] for r in reps]}
    return doc
