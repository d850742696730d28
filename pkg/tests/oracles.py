"""Independent reference computations used by the tests.

Nothing here imports the code under test: kernels are written out from
their textbook formulas and posteriors use a dense linear solve.
"""

import math

import numpy as np
from scipy.special import gamma, kv


def se(r, l):
    return math.exp(-(r ** 2) / (2 * l ** 2))


def matern_bessel(r, l, nu):
    """General Matern via the Gamma/modified-Bessel expression."""
    if r == 0:
        return 1.0
    s = math.sqrt(2 * nu) * r / l
    return 2 ** (1 - nu) / gamma(nu) * s ** nu * kv(nu, s)


def kernel_matrix(kfun, A, B):
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    out = np.empty((len(A), len(B)))
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            out[i, j] = kfun(float(np.sqrt(np.sum((a - b) ** 2))))
    return out


def dense_posterior(kfun, lam, X, y, Q):
    """Mean (or None) and variance at Q from a direct solve of (K + lam I)."""
    K = kernel_matrix(kfun, X, X) + lam * np.eye(len(X))
    k = kernel_matrix(kfun, X, Q)
    var = np.array([kfun(0.0)] * len(Q)) - np.einsum("ij,ij->j", k, np.linalg.solve(K, k))
    mu = None if y is None else k.T @ np.linalg.solve(K, np.asarray(y, float))
    return mu, var


def dense_gain(kfun, lam, X):
    K = kernel_matrix(kfun, X, X)
    sign, logdet = np.linalg.slogdet(np.eye(len(X)) + K / lam)
    assert sign > 0
    return 0.5 * logdet


def orig_recurrence(T):
    """N_i = ceil(sqrt(T N_{i-1})), computed with exact integer arithmetic."""
    out, prev, used = [], 1, 0
    while used < T:
        x = T * prev
        n = math.isqrt(x)
        if n * n < x:
            n += 1
        n = min(n, T - used)
        out.append(n)
        used += n
        prev = n
    return out
