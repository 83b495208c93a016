"""Divided differences of the exponential at complex nodes.

The Fourier transform of a simplex indicator is a divided difference of
``exp`` at the (scaled) vertex phases, so everything downstream rests on
evaluating ``exp[z_0, ..., z_m]`` accurately, including when nodes
coincide or nearly coincide.

Strategy: a node cluster whose spread about its mean is at most
``cluster_radius`` is summed by the Taylor series

    exp[z] = e^c * sum_k h_k(z - c) / (m + k)!

(h_k the complete homogeneous symmetric polynomials). Otherwise the pair of
nodes furthest apart is split off with the recurrence

    exp[A] = (exp[A - {z_i}] - exp[A - {z_j}]) / (z_j - z_i)

whose divisor then exceeds ``cluster_radius``, so no step amplifies
round-off by more than ``2 / cluster_radius``.
"""

from __future__ import annotations

import math

import numpy as np

CLUSTER_RADIUS = 1.0
TAYLOR_TERMS = 30

_INV_FACT = np.array([1.0 / math.factorial(k) for k in range(TAYLOR_TERMS + 16)])


def _taylor(z: np.ndarray) -> np.ndarray:
    n, m = z.shape
    c = z.mean(axis=1)
    x = z - c[:, None]
    # h[j] holds h_k over the first j+1 variables, updated in place over k
    h = np.ones((m, n), dtype=complex)
    total = h[-1] * _INV_FACT[m - 1]
    for k in range(1, TAYLOR_TERMS):
        h[0] = h[0] * x[:, 0]
        for j in range(1, m):
            h[j] = h[j - 1] + x[:, j] * h[j]
        total = total + h[-1] * _INV_FACT[m - 1 + k]
    return np.exp(c) * total


def exp_divided_difference(z, cluster_radius: float = CLUSTER_RADIUS) -> np.ndarray:
    """Return ``exp[z_0, ..., z_{m-1}]`` row-wise for ``z`` of shape (n, m).

    Repeated nodes are allowed and give the confluent (Hermite) value.
    """
    z = np.asarray(z, dtype=complex)
    squeeze = z.ndim == 1
    if squeeze:
        z = z[None, :]
    out = _dd(z, cluster_radius)
    return out[0] if squeeze else out


def _dd(z: np.ndarray, radius: float) -> np.ndarray:
    n, m = z.shape
    if m == 1:
        return np.exp(z[:, 0])
    out = np.empty(n, dtype=complex)
    if n == 0:
        return out
    spread = np.abs(z - z.mean(axis=1, keepdims=True)).max(axis=1)
    small = spread <= radius
    if small.any():
        out[small] = _taylor(z[small])
    big = np.flatnonzero(~small)
    if big.size == 0:
        return out
    zb = z[big]
    gaps = np.abs(zb[:, :, None] - zb[:, None, :]).reshape(len(big), m * m)
    flat = gaps.argmax(axis=1)
    pi, pj = np.divmod(flat, m)
    for i in range(m):
        for j in range(i + 1, m):
            sel = ((pi == i) & (pj == j)) | ((pi == j) & (pj == i))
            if not sel.any():
                continue
            zz = zb[sel]
            keep_i = [k for k in range(m) if k != i]
            keep_j = [k for k in range(m) if k != j]
            without_i = _dd(zz[:, keep_i], radius)
            without_j = _dd(zz[:, keep_j], radius)
            out[big[sel]] = (without_i - without_j) / (zz[:, j] - zz[:, i])
    return out
