"""Compiled inner loops of the online / coordinate-descent learners.

Each kernel performs one pass over the rows of a CSR matrix in the given
order and updates the dense (n_classes, n_features) weights in place.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def pa_pass(indptr, indices, data, Y, W, order, C, sq_norms):
    n_updates = 0
    k = W.shape[0]
    for i in order:
        if sq_norms[i] == 0.0:
            continue
        lo, hi = indptr[i], indptr[i + 1]
        touched = False
        for c in range(k):
            m = 0.0
            for p in range(lo, hi):
                m += W[c, indices[p]] * data[p]
            loss = 1.0 - Y[i, c] * m
            if loss > 0.0:
                tau = min(C, loss / sq_norms[i])
                step = tau * Y[i, c]
                for p in range(lo, hi):
                    W[c, indices[p]] += step * data[p]
                touched = True
        if touched:
            n_updates += 1
    return n_updates


@njit(cache=True)
def dual_cd_pass(indptr, indices, data, Y, W, A, q, C, order):
    """One sweep of hinge-loss dual coordinate descent; returns the projected-gradient spread per class."""
    k = W.shape[0]
    pg_max = np.full(k, -np.inf)
    pg_min = np.full(k, np.inf)
    for i in order:
        if q[i] == 0.0:
            continue
        lo, hi = indptr[i], indptr[i + 1]
        for c in range(k):
            m = 0.0
            for p in range(lo, hi):
                m += W[c, indices[p]] * data[p]
            g = Y[i, c] * m - 1.0
            a = A[i, c]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= C:
                pg = max(g, 0.0)
            else:
                pg = g
            if pg > pg_max[c]:
                pg_max[c] = pg
            if pg < pg_min[c]:
                pg_min[c] = pg
            if pg != 0.0:
                new = min(max(a - g / q[i], 0.0), C)
                step = (new - a) * Y[i, c]
                if step != 0.0:
                    A[i, c] = new
                    for p in range(lo, hi):
                        W[c, indices[p]] += step * data[p]
    return pg_max - pg_min


@njit(cache=True)
def sgd_pass(indptr, indices, data, Y, V, order, alpha, t0, t, scale):
    """Hinge + L2 SGD with weights stored as ``scale * V``; returns (t, scale)."""
    k = V.shape[0]
    margins = np.empty(k)
    for i in order:
        eta = 1.0 / (alpha * (t + t0))
        lo, hi = indptr[i], indptr[i + 1]
        for c in range(k):
            m = 0.0
            for p in range(lo, hi):
                m += V[c, indices[p]] * data[p]
            margins[c] = scale * m
        scale *= 1.0 - eta * alpha
        for c in range(k):
            if Y[i, c] * margins[c] < 1.0:
                step = eta * Y[i, c] / scale
                for p in range(lo, hi):
                    V[c, indices[p]] += step * data[p]
        if scale < 1e-9:
            V *= scale
            scale = 1.0
        t += 1
    return t, scale
