"""Bound states of complex potentials.

Two strategies are provided: zeros of the transfer-matrix element M11 in the
complex exterior wavenumber k (short-range potentials), and two-sided
shooting with a complex Newton search in E (confining potentials). Both use
the fixed-step RK4 march in `interlace._rk4`.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ._rk4 import rk4_path
from .grid import Grid
from .potentials import PotentialSpec
from .wavefunction import PeakPositive, WaveFunction, fix_phase, normalize

__all__ = [
    "MagnitudeOverflowError", "TruncationError", "TransferMatrix", "BoundStateResult",
    "integrate", "integrate_on_grid", "transfer_matrix", "m11_values",
    "find_bound_states_shortrange", "find_bound_states_confining", "normalize", "fix_phase",
    "default_threads",
]

log = logging.getLogger(__name__)

NEWTON_STEP = 1e-6
NEWTON_TOL = 1e-10
NEWTON_MAXIT = 50
DEDUP_TOL = 1e-6


class MagnitudeOverflowError(ArithmeticError):
    """|psi| exceeded the overflow guard during integration."""


class TruncationError(RuntimeError):
    """The truncated domain is too small for the boundary decay criterion."""


def default_threads() -> int:
    env = os.environ.get("INTERLACE_THREADS")
    return int(env) if env else (os.cpu_count() or 1)


# --- RK4 paths ---------------------------------------------------------------

class _Path:
    """Nodes of a march plus the potential sampled at each RK4 stage."""

    def __init__(self, spec: PotentialSpec, nodes: NDArray):
        nodes = np.asarray(nodes, dtype=float)
        self.nodes = nodes
        hs = np.diff(nodes)
        a, b = nodes[:-1], nodes[1:]
        xa, xb = a.copy(), b.copy()
        bps = np.asarray(spec.breakpoints, dtype=float)
        if bps.size:
            # one-sided limits at discontinuities: nudge stage points into the step
            tiny = 1e-9 * np.abs(hs)
            on_a = np.min(np.abs(a[:, None] - bps[None, :]), axis=1) < 1e-12
            on_b = np.min(np.abs(b[:, None] - bps[None, :]), axis=1) < 1e-12
            xa[on_a] += np.sign(hs[on_a]) * tiny[on_a]
            xb[on_b] -= np.sign(hs[on_b]) * tiny[on_b]
        self.hs = hs
        self.va = np.asarray(spec(xa), dtype=complex)
        self.vm = np.asarray(spec(0.5 * (a + b)), dtype=complex)
        self.vb = np.asarray(spec(xb), dtype=complex)

    def run(self, E, psi0, dpsi0, store=False, threads=1):
        E = np.atleast_1d(np.asarray(E, dtype=complex))
        psi0 = np.broadcast_to(np.asarray(psi0, dtype=complex), E.shape).copy()
        dpsi0 = np.broadcast_to(np.asarray(dpsi0, dtype=complex), E.shape).copy()
        rows = self.nodes.size if store else 1

        def work(sl):
            n = sl.stop - sl.start
            op = np.empty((rows, n), dtype=complex)
            od = np.empty((rows, n), dtype=complex)
            st = rk4_path(self.hs, self.va, self.vm, self.vb, E[sl], psi0[sl], dpsi0[sl],
                          op, od, store)
            return st, op, od

        threads = max(1, min(int(threads or 1), E.size))
        bounds = np.linspace(0, E.size, threads + 1).astype(int)
        slices = [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        if len(slices) == 1:
            parts = [work(slices[0])]
        else:
            with ThreadPoolExecutor(len(slices)) as ex:
                parts = list(ex.map(work, slices))
        for st, _, _ in parts:
            if st >= 0:
                raise MagnitudeOverflowError(
                    f"|psi| exceeded 1e250 near x = {self.nodes[st + 1]:.6g}; shrink the domain")
        psi = np.concatenate([p[1] for p in parts], axis=1)
        dpsi = np.concatenate([p[2] for p in parts], axis=1)
        return psi, dpsi


def _with_breakpoints(nodes: NDArray, spec: PotentialSpec):
    """Insert breakpoints lying strictly between nodes; return nodes and output indices."""
    lo, hi = min(nodes[0], nodes[-1]), max(nodes[0], nodes[-1])
    extra = [p for p in spec.breakpoints if lo < p < hi
             and np.min(np.abs(nodes - p)) > 1e-12 * max(1.0, abs(p))]
    if not extra:
        return nodes, np.arange(nodes.size)
    flag = np.r_[np.ones(nodes.size, bool), np.zeros(len(extra), bool)]
    allx = np.r_[nodes, extra]
    order = np.argsort(allx, kind="stable")
    if nodes[-1] < nodes[0]:
        order = order[::-1]
    return allx[order], np.flatnonzero(flag[order])


def integrate(spec: PotentialSpec, E, from_x: float, to_x: float, psi0, dpsi0,
              h: float = 1e-3, trajectory: bool = False, threads: int = 1):
    """RK4 for psi'' = (V - E) psi from from_x to to_x.

    E, psi0 and dpsi0 broadcast together. Returns the end values, or with
    trajectory=True the tuple (x, psi, dpsi) with one row per node. The step
    is the largest value <= h dividing the interval; potential breakpoints
    are added as extra nodes so piecewise potentials keep full order.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    scalar = np.ndim(E) == 0 and np.ndim(psi0) == 0 and np.ndim(dpsi0) == 0
    n = max(1, int(math.ceil(abs(to_x - from_x) / h - 1e-9)))
    nodes, out = _with_breakpoints(np.linspace(from_x, to_x, n + 1), spec)
    shape = np.broadcast(np.asarray(E), np.asarray(psi0), np.asarray(dpsi0)).shape
    Ev = np.broadcast_to(np.asarray(E, complex), shape).ravel()
    p0 = np.broadcast_to(np.asarray(psi0, complex), shape).ravel()
    d0 = np.broadcast_to(np.asarray(dpsi0, complex), shape).ravel()
    path = _Path(spec, nodes)
    psi, dpsi = path.run(Ev, p0, d0, store=trajectory, threads=threads)
    if trajectory:
        psi, dpsi = psi[out], dpsi[out]
        xs = nodes[out]
        if scalar:
            return xs, psi[:, 0], dpsi[:, 0]
        return xs, psi.reshape((-1,) + shape), dpsi.reshape((-1,) + shape)
    if scalar:
        return complex(psi[0, 0]), complex(dpsi[0, 0])
    return psi[0].reshape(shape), dpsi[0].reshape(shape)


def integrate_on_grid(spec: PotentialSpec, E, grid: Grid, start: int, psi0, dpsi0):
    """March outward from grid point `start` to both ends.

    Returns psi, dpsi of shape (n_points, len(E)).
    """
    x = grid.x
    E = np.atleast_1d(np.asarray(E, complex))
    psi = np.empty((x.size, E.size), complex)
    dpsi = np.empty_like(psi)
    for seg in (x[start:], x[start::-1]):
        nodes, out = _with_breakpoints(seg, spec)
        if seg.size < 2:
            continue
        p, d = _Path(spec, nodes).run(E, psi0, dpsi0, store=True)
        p, d = p[out], d[out]
        if seg[-1] >= seg[0]:
            psi[start:], dpsi[start:] = p, d
        else:
            psi[:start + 1], dpsi[:start + 1] = p[::-1], d[::-1]
    if start == x.size - 1 or start == 0:
        psi[start], dpsi[start] = psi0, dpsi0
    return psi, dpsi


# --- results -----------------------------------------------------------------

@dataclass(frozen=True)
class TransferMatrix:
    m11: complex
    m12: complex
    m21: complex
    m22: complex
    k: complex
    energy: complex

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    def as_array(self):
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])


@dataclass(frozen=True, eq=False)
class BoundStateResult:
    energies: list
    states: list
    residuals: list
    method: str  # "Transfer", "Shooting" or "Analytic"
    complex_energies: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    spec: PotentialSpec | None = None

    def __len__(self):
        return len(self.energies)


def _check_reality(E: complex, tol: float, warn_tol: float, warnings: list) -> bool:
    if abs(E.imag) < tol:
        return True
    if abs(E.imag) < warn_tol:
        msg = f"accepted E = {E.real:.10g} with |Im E| = {abs(E.imag):.2e} (warning band)"
        log.warning(msg)
        warnings.append(msg)
        return True
    return False


def _dedupe(roots, tol=DEDUP_TOL):
    out = []
    for r in sorted(roots, key=lambda z: (z.real, z.imag)):
        if all(abs(r - q) > tol for q in out):
            out.append(r)
    return out


def _newton(f, seeds, maxit=NEWTON_MAXIT, tol=NEWTON_TOL, step=NEWTON_STEP, max_move=None,
            domain=None):
    """Vectorized complex Newton with central-difference derivative.

    Returns the converged roots; seeds that diverge, stall or leave
    `domain` (a predicate on the iterates) are dropped.
    """
    z = np.asarray(seeds, complex).copy()
    active = np.ones(z.size, bool)
    done = np.zeros(z.size, bool)
    for _ in range(maxit):
        if not active.any():
            break
        za = z[active]
        vals = f(np.concatenate([za, za + step, za - step]))
        n = za.size
        fz, fp, fm = vals[:n], vals[n:2 * n], vals[2 * n:]
        d = (fp - fm) / (2 * step)
        with np.errstate(all="ignore"):
            dz = np.where(d != 0, fz / d, np.nan)
        if max_move is not None:
            big = np.abs(dz) > max_move
            dz[big] = dz[big] / np.abs(dz[big]) * max_move
        znew = za - dz
        idx = np.flatnonzero(active)
        ok = np.isfinite(znew)
        if domain is not None:
            ok[ok] = domain(znew[ok])
        conv = ok & ((np.abs(fz) < tol) | (np.abs(dz) < 1e-13 * (1 + np.abs(za))))
        z[idx[ok]] = znew[ok]
        done[idx[conv]] = True
        active[idx[conv | ~ok]] = False
    return z[done]


# --- transfer matrix -----------------------------------------------------------

def _zone(spec):
    zone = spec.interaction_zone
    if zone is None or spec.outside_value is None:
        raise ValueError(f"{spec.family} is not short-range; use the shooting method")
    return zone, spec.outside_value


def _m_batch(spec, ks, h=1e-3, threads=1, path=None):
    """All four M elements for an array of exterior wavenumbers."""
    (xl, xr), vout = _zone(spec)
    ks = np.asarray(ks, complex)
    if np.any(np.abs(ks) < 1e-12):
        raise ValueError("transfer matrix is singular at k = 0")
    if path is None:
        n = max(1, int(math.ceil((xr - xl) / h - 1e-9)))
        path = _Path(spec, _with_breakpoints(np.linspace(xr, xl, n + 1), spec)[0])
    E = ks * ks + vout
    er = np.exp(1j * ks * xr)
    psi0 = np.r_[er, 1 / er]
    dpsi0 = np.r_[1j * ks * er, -1j * ks / er]
    psi, dpsi = path.run(np.r_[E, E], psi0, dpsi0, threads=threads)
    psi, dpsi = psi[0], dpsi[0]
    kk = np.r_[ks, ks]
    el = np.exp(1j * kk * xl)
    A = (1j * kk * psi + dpsi) / (2j * kk) / el
    B = (1j * kk * psi - dpsi) / (2j * kk) * el
    n = ks.size
    return A[:n], A[n:], B[:n], B[n:]


def transfer_matrix(spec: PotentialSpec, k: complex, h: float = 1e-3) -> TransferMatrix:
    """M mapping right-exterior plane-wave coefficients to the left exterior.

    Outside the zone psi = A e^{ikx} + B e^{-ikx}; E = k^2 + V_outside.
    """
    (_, vout) = _zone(spec)
    m11, m12, m21, m22 = (complex(v[0]) for v in _m_batch(spec, [complex(k)], h))
    return TransferMatrix(m11, m12, m21, m22, complex(k), complex(k) ** 2 + vout)


def m11_values(spec: PotentialSpec, ks, h: float = 1e-3, threads: int | None = None):
    """M11 on an array of k (the k-plane diagnostic map)."""
    threads = threads or default_threads()
    ks = np.asarray(ks, complex)
    return _m_batch(spec, ks.ravel(), h, threads)[0].reshape(ks.shape)


def _local_minima_2d(a):
    """Mask of points not larger than any of their 8 neighbours."""
    p = np.pad(a, 1, constant_values=np.inf)
    m = np.ones(a.shape, bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                m &= a <= p[1 + di:1 + di + a.shape[0], 1 + dj:1 + dj + a.shape[1]]
    return m


def _shortrange_state(spec, k, h):
    (xl, xr), vout = _zone(spec)
    E = k * k + vout
    pad = min(max(math.log(1e7) / k.imag, 2.0), 400.0)
    grid = Grid.from_spacing(xl - pad, xr + pad, h)
    x = grid.x
    inside = np.flatnonzero((x > xl) & (x < xr))
    nodes = np.r_[xr, x[inside][::-1], xl]
    nodes, out = _with_breakpoints(nodes, spec)
    er = np.exp(1j * k * xr)
    p, d = _Path(spec, nodes).run(np.array([E]), er, 1j * k * er, store=True)
    p, d = p[out, 0], d[out, 0]
    psi = np.empty(x.size, complex)
    dpsi = np.empty_like(psi)
    psi[inside], dpsi[inside] = p[1:-1][::-1], d[1:-1][::-1]
    right = x >= xr
    psi[right] = np.exp(1j * k * x[right])
    dpsi[right] = 1j * k * psi[right]
    # left exterior keeps only the decaying wave
    B = (1j * k * p[-1] - d[-1]) / (2j * k) * np.exp(1j * k * xl)
    left = x <= xl
    psi[left] = B * np.exp(-1j * k * x[left])
    dpsi[left] = -1j * k * psi[left]
    return WaveFunction(grid, psi, dpsi, float(E.real))


def find_bound_states_shortrange(spec: PotentialSpec, k_region=None, grid_density=(41, 121),
                                 h: float = 1e-3, reality_tol: float = 1e-6,
                                 warn_tol: float = 1e-3, residual_tol: float = 1e-4,
                                 phase=None, threads: int | None = None) -> BoundStateResult:
    """Bound states as zeros of M11(k) with Im k > 0.

    k_region is ((re_min, re_max), (im_min, im_max)); the default spans
    energies from the bottom of Re V up to the exterior level.
    """
    from .analysis import residual_oracle

    (xl, xr), vout = _zone(spec)
    threads = threads or default_threads()
    phase = phase or PeakPositive()
    if k_region is None:
        xs = np.linspace(xl, xr, 2001)
        depth = max(vout.real - float(np.min(np.real(spec(xs)))), 1e-3)
        top = math.sqrt(depth) * 1.2 + 0.1
        k_region = ((-0.3 * top, 0.3 * top), (0.02, top))
    (rlo, rhi), (ilo, ihi) = k_region
    if ilo < 0:
        raise ValueError("k_region must lie in the upper half-plane")
    nr, ni = grid_density
    kr, ki = np.meshgrid(np.linspace(rlo, rhi, nr), np.linspace(ilo, ihi, ni), indexing="ij")
    ks = kr + 1j * ki
    n = max(1, int(math.ceil((xr - xl) / h - 1e-9)))
    path = _Path(spec, _with_breakpoints(np.linspace(xr, xl, n + 1), spec)[0])

    def f(z):
        return _m_batch(spec, z, h, threads, path)[0]

    mag = np.abs(f(ks.ravel())).reshape(ks.shape)
    seeds = ks[_local_minima_2d(mag)]
    kmax = 4 * max(abs(rlo), abs(rhi), ihi)

    def inside(z):
        return (z.imag > 0) & (np.abs(z) < kmax)

    roots = _newton(f, seeds, domain=inside) if seeds.size else np.array([])
    roots = [r for r in _dedupe(list(roots)) if r.imag > 0]
    warnings, states, energies, cenergies, residuals = [], [], [], [], []
    for k in roots:
        E = k * k + vout
        if not _check_reality(E, reality_tol, warn_tol, warnings):
            continue
        wf = fix_phase(normalize(_shortrange_state(spec, k, h)), phase)
        r = residual_oracle(spec, wf, wf.energy, exclude=spec.breakpoints)
        if r > residual_tol:
            warnings.append(f"dropped E = {E.real:.10g}: residual {r:.2e}")
            continue
        energies.append(float(E.real))
        cenergies.append(complex(E))
        states.append(wf)
        residuals.append(r)
    order = np.argsort(energies)
    return BoundStateResult([energies[i] for i in order], [states[i] for i in order],
                            [residuals[i] for i in order], "Transfer",
                            [cenergies[i] for i in order], warnings, spec)


# --- two-sided shooting --------------------------------------------------------

class _Shooter:
    def __init__(self, spec, L, h, x_match=None, threads=1):
        self.spec = spec
        self.grid = Grid.from_spacing(-L, L, h)
        x = self.grid.x
        if x_match is None:
            m = int(np.argmin(np.real(spec(x))))
        else:
            m = int(np.argmin(np.abs(x - x_match)))
        m = min(max(m, 1), x.size - 2)
        self.m = m
        self.left_nodes, self.left_out = _with_breakpoints(x[:m + 1], spec)
        self.right_nodes, self.right_out = _with_breakpoints(x[m:][::-1], spec)
        self.left = _Path(spec, self.left_nodes)
        self.right = _Path(spec, self.right_nodes)
        self.vl, self.vr = complex(spec(x[0])), complex(spec(x[-1]))
        self.threads = threads

    def _init(self, E):
        pl = np.sqrt(self.vl - E)
        pr = np.sqrt(self.vr - E)
        return pl, pr

    def mismatch(self, E):
        """Log-derivative difference at the matching point (analytic in E)."""
        E = np.asarray(E, complex)
        pl, pr = self._init(E)
        one = np.ones_like(E)
        a, da = self.left.run(E, one, pl, threads=self.threads)
        b, db = self.right.run(E, one, -pr, threads=self.threads)
        return da[0] / a[0] - db[0] / b[0]

    def state(self, E):
        pl, pr = self._init(np.array([E]))
        a, da = self.left.run(np.array([E]), 1.0, pl, store=True)
        b, db = self.right.run(np.array([E]), 1.0, -pr, store=True)
        a, da = a[self.left_out, 0], da[self.left_out, 0]
        b, db = b[self.right_out, 0][::-1], db[self.right_out, 0][::-1]
        s = a[-1] / b[0]
        psi = np.r_[a, s * b[1:]]
        dpsi = np.r_[da, s * db[1:]]
        return WaveFunction(self.grid, psi, dpsi, float(E.real))


def find_bound_states_confining(spec: PotentialSpec, E_window=(0.0, 10.0), x_trunc: float = 10.0,
                                scan_points: int = 200, h: float = 1e-3,
                                reality_tol: float = 1e-6, warn_tol: float = 1e-3,
                                residual_tol: float = 1e-4, decay_tol: float = 1e-6,
                                max_doublings: int = 3, x_match: float | None = None,
                                phase=None, threads: int | None = None) -> BoundStateResult:
    """Two-sided shooting from +-x_trunc with WKB-decaying starts.

    The truncation doubles until every accepted state decays to decay_tol of
    its peak at both ends.
    """
    L = float(x_trunc)
    last = None
    for _ in range(max_doublings + 1):
        try:
            res, ok = _shoot(spec, E_window, L, scan_points, h, reality_tol, warn_tol,
                             residual_tol, decay_tol, x_match, phase, threads)
        except MagnitudeOverflowError as exc:
            raise TruncationError(f"cannot satisfy decay at x_trunc = {L:g}: {exc}") from exc
        if ok:
            return res
        last = res
        L *= 2
    raise TruncationError(f"boundary decay check failed up to x_trunc = {L / 2:g}"
                          f" ({len(last)} candidate states)")


def _shoot(spec, window, L, scan_points, h, reality_tol, warn_tol, residual_tol, decay_tol,
           x_match, phase, threads):
    from .analysis import residual_oracle

    threads = threads or default_threads()
    phase = phase or PeakPositive()
    lo, hi = window
    sh = _Shooter(spec, L, h, x_match, threads)
    Es = np.linspace(lo, hi, scan_points)
    mag = np.abs(sh.mismatch(Es.astype(complex)))
    inner = np.flatnonzero((mag[1:-1] <= mag[:-2]) & (mag[1:-1] <= mag[2:])) + 1
    seeds = Es[inner].astype(complex)
    roots = _newton(sh.mismatch, seeds, max_move=(hi - lo) / 4) if seeds.size else np.array([])
    roots = [r for r in _dedupe(list(roots)) if lo <= r.real <= hi]
    warnings, states, energies, cenergies, residuals = [], [], [], [], []
    decay_ok = True
    for E in roots:
        if not _check_reality(E, reality_tol, warn_tol, warnings):
            continue
        wf = sh.state(E)
        amp = np.abs(wf.psi)
        if max(amp[0], amp[-1]) > decay_tol * amp.max():
            decay_ok = False
        wf = fix_phase(normalize(wf), phase)
        r = residual_oracle(spec, wf, wf.energy, exclude=spec.breakpoints)
        if r > residual_tol:
            warnings.append(f"dropped E = {E.real:.10g}: residual {r:.2e}")
            continue
        energies.append(float(E.real))
        cenergies.append(complex(E))
        states.append(wf)
        residuals.append(r)
    order = np.argsort(energies)
    res = BoundStateResult([energies[i] for i in order], [states[i] for i in order],
                           [residuals[i] for i in order], "Shooting",
                           [cenergies[i] for i in order], warnings, spec)
    return res, decay_ok
