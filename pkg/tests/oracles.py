"""Independent brute-force references used to check the optimized paths.

Everything here is deliberately naive: full distance matrices with
argsort, direct O(N^2) DFT summation, closed-form axis-angle rotation.
Nothing imports the implementation's internals beyond plain numpy.
"""

import numpy as np


def naive_standardize(X):
    """Population z-scoring with the same zero-variance guard semantics."""
    X = np.asarray(X, dtype=np.float64)
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    denom = np.where(sigma >= 1e-12, sigma, 1.0)
    return (X - mu) / denom, mu, denom


def naive_lof_fit(X, k):
    """kdist, lrd and per-point LOF by full sort, self excluded."""
    n = X.shape[0]
    D = np.empty((n, n))
    for i in range(n):
        D[i] = np.sqrt(((X - X[i]) ** 2).sum(axis=1))
    np.fill_diagonal(D, np.inf)
    kdist = np.sort(D, axis=1)[:, k - 1]
    neighborhoods = [np.nonzero(D[i] <= kdist[i])[0] for i in range(n)]
    lrd = np.empty(n)
    for i, nbr in enumerate(neighborhoods):
        s = np.maximum(kdist[nbr], D[i, nbr]).sum()
        lrd[i] = nbr.shape[0] / s if s >= 1e-12 else 1e12
    lof = np.empty(n)
    for i, nbr in enumerate(neighborhoods):
        lof[i] = lrd[nbr].sum() / (nbr.shape[0] * lrd[i])
    return kdist, lrd, lof, neighborhoods


def naive_lof_query(X, kdist, lrd, q, k):
    """LOF of one query against reference points, by full sort."""
    dist = np.sqrt(((X - q) ** 2).sum(axis=1))
    kd = np.sort(dist)[k - 1]
    nbr = np.nonzero(dist <= kd)[0]
    s = np.maximum(kdist[nbr], dist[nbr]).sum()
    lrd_q = nbr.shape[0] / s if s >= 1e-12 else 1e12
    return lrd[nbr].sum() / (nbr.shape[0] * lrd_q), nbr


def naive_psd(x, fs):
    """One-sided periodogram via direct DFT summation (no FFT)."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    m = n // 2 + 1
    p = np.empty(m)
    for kk in range(m):
        re = sum(x[j] * np.cos(-2.0 * np.pi * kk * j / n) for j in range(n))
        im = sum(x[j] * np.sin(-2.0 * np.pi * kk * j / n) for j in range(n))
        p[kk] = (re * re + im * im) / (fs * n)
    for kk in range(1, m):
        if n % 2 == 0 and kk == n // 2:
            continue
        p[kk] *= 2.0
    return p


def axis_angle_quat(axis, angle):
    """Closed-form unit quaternion (x, y, z, w) for a rotation about axis."""
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    return np.concatenate([axis * np.sin(angle / 2.0), [np.cos(angle / 2.0)]])
