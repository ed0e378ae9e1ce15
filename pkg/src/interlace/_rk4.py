"""Compiled RK4 kernel for psi'' = (V - E) psi, vectorized over energies."""
from numba import njit

OVERFLOW = 1e250


@njit(cache=True, nogil=True)
def rk4_path(hs, va, vm, vb, E, psi0, dpsi0, out_psi, out_dpsi, store):
    """March (psi, psi') along steps of signed length hs[i].

    va, vm, vb hold V at the start, midpoint and end of each step. When
    `store` is true the state after every node is written to out_*[i];
    otherwise out_*[0] receives the end state. Returns -1 on success or
    the step index at which |psi| exceeded the overflow guard.
    """
    n_e = E.shape[0]
    n_s = hs.shape[0]
    for j in range(n_e):
        p = psi0[j]
        d = dpsi0[j]
        e = E[j]
        if store:
            out_psi[0, j] = p
            out_dpsi[0, j] = d
        for i in range(n_s):
            h = hs[i]
            qa = va[i] - e
            qm = vm[i] - e
            qb = vb[i] - e
            k1p = d
            k1d = qa * p
            k2p = d + 0.5 * h * k1d
            k2d = qm * (p + 0.5 * h * k1p)
            k3p = d + 0.5 * h * k2d
            k3d = qm * (p + 0.5 * h * k2p)
            k4p = d + h * k3d
            k4d = qb * (p + h * k3p)
            p = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            d = d + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
            if abs(p) > OVERFLOW or p != p:
                return i
            if store:
                out_psi[i + 1, j] = p
                out_dpsi[i + 1, j] = d
        if not store:
            out_psi[0, j] = p
            out_dpsi[0, j] = d
    return -1
