"""Numba-compiled inner loop of the block Gibbs precision-matrix update.

One call performs a full column sweep of a single precision matrix.  The
running inverse W = inv(omega) is refreshed from scratch at the start of
the sweep and then maintained with O(p^2) block-inverse updates per
column, so each column costs one (p-1)x(p-1) Cholesky plus triangular
solves instead of repeated full inversions.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _solve_lower(L, b):
    n = L.shape[0]
    x = np.empty(n)
    for i in range(n):
        s = b[i]
        for k in range(i):
            s -= L[i, k] * x[k]
        x[i] = s / L[i, i]
    return x


@njit(cache=True)
def _solve_lower_t(L, b):
    # solves L.T x = b for lower-triangular L
    n = L.shape[0]
    x = np.empty(n)
    for i in range(n - 1, -1, -1):
        s = b[i]
        for k in range(i + 1, n):
            s -= L[k, i] * x[k]
        x[i] = s / L[i, i]
    return x


@njit(cache=True)
def sweep_precision(omega, graph, gram, n, lam, nu0, nu1, rng):
    """One Gibbs sweep over all columns of omega, in place.

    graph: symmetric 0/1 int8 matrix selecting the slab variance nu1^2
    (vs the spike nu0^2) for each off-diagonal element.  gram = X'X.
    """
    p = omega.shape[0]
    if p == 1:
        omega[0, 0] = rng.gamma(n / 2.0 + 1.0, 2.0 / (gram[0, 0] + lam))
        return
    W = np.linalg.inv(omega)
    idx = np.empty(p - 1, np.int64)
    for j in range(p):
        t = 0
        for i in range(p):
            if i != j:
                idx[t] = i
                t += 1
        w12 = W[idx, j]
        O11inv = W[idx][:, idx] - np.outer(w12, w12) / W[j, j]
        s12 = gram[idx, j]
        sjj = gram[j, j]
        Cinv = (sjj + lam) * O11inv
        for t in range(p - 1):
            v = nu1 if graph[idx[t], j] == 1 else nu0
            Cinv[t, t] += 1.0 / (v * v)
        L = np.linalg.cholesky(Cinv)
        mean = _solve_lower_t(L, _solve_lower(L, -s12))
        z = np.empty(p - 1)
        for t in range(p - 1):
            z[t] = rng.standard_normal()
        u = mean + _solve_lower_t(L, z)
        r = rng.gamma(n / 2.0 + 1.0, 2.0 / (sjj + lam))
        h = O11inv @ u
        for t in range(p - 1):
            omega[idx[t], j] = u[t]
            omega[j, idx[t]] = u[t]
        omega[j, j] = r + u @ h
        # block-inverse refresh of W for the modified row/column j
        for a in range(p - 1):
            ia = idx[a]
            W[ia, j] = -h[a] / r
            W[j, ia] = -h[a] / r
            for b in range(p - 1):
                W[ia, idx[b]] = O11inv[a, b] + h[a] * h[b] / r
        W[j, j] = 1.0 / r
