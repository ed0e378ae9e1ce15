"""Closed-form eigenfunctions used as independent oracles."""
from __future__ import annotations

import numpy as np

from .potentials import Levai

__all__ = ["poschl_teller_ground", "poschl_teller_wronskian", "levai_state", "jacobi"]


def poschl_teller_ground(kappa: float, x):
    """Normalized ground state and derivative of the PoschlTeller potential.

    psi = (k/pi)^{1/2} exp(i arctan tanh(kx/2)) / cosh^{1/2}(kx), E = -k^2/4.
    """
    x = np.asarray(x, float)
    ph = np.arctan(np.tanh(kappa * x / 2))
    psi = np.sqrt(kappa / np.pi) * np.exp(1j * ph) / np.sqrt(np.cosh(kappa * x))
    # (ln psi)' = -k tanh(kx)/2 + i k / (2 cosh kx)
    dlog = -0.5 * kappa * np.tanh(kappa * x) + 0.5j * kappa / np.cosh(kappa * x)
    return psi, psi * dlog


def poschl_teller_wronskian(kappa: float, x):
    """W[psi_R, psi_I] of the normalized ground state: -(k^2/2pi) sech^2(kx)."""
    x = np.asarray(x, float)
    return -(kappa ** 2 / (2 * np.pi)) / np.cosh(kappa * x) ** 2


def _binom(top: complex, k: int) -> complex:
    out = 1.0 + 0j
    for j in range(1, k + 1):
        out *= (top - k + j) / j
    return out


def jacobi(n: int, a: complex, b: complex, z):
    """Jacobi polynomial P_n^{(a,b)}(z) for complex parameters and argument."""
    z = np.asarray(z, complex)
    tot = np.zeros_like(z)
    for s in range(n + 1):
        tot += _binom(n + a, n - s) * _binom(n + b, s) * ((z - 1) / 2) ** s * ((z + 1) / 2) ** (n - s)
    return tot


def levai_state(spec: Levai, n: int, x):
    """Unnormalized (1-z)^{nu/2+1/4} (1+z)^{mu/2+1/4} P_n(z), z = i sinh(kx + i eps).

    Principal branches are continuous on the real line for small eps since
    1 - z has positive real part and 1 + z only reaches the negative real
    half-axis away from Im = 0.
    """
    x = np.asarray(x, float)
    k, e = spec.kappa, spec.eps
    sh = np.sinh(k * x) * np.cos(e) + 1j * np.cosh(k * x) * np.sin(e)
    z = 1j * sh
    nu, mu = spec.nu, spec.mu
    return (1 - z) ** (nu / 2 + 0.25) * (1 + z) ** (mu / 2 + 0.25) * jacobi(n, nu, mu, z)
