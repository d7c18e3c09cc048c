"""Dual-path numeric kernels: numba @njit with a pure-numpy fallback.

The two kernels here dominate the optimizer's runtime (product-of-cosines
kernel matrices and Monte-Carlo pair scoring).  Both carry a compiled and a
vectorized-numpy implementation; ``VQE_SMO_NUMBA=0`` in the environment
selects the numpy path, as does an unimportable numba.  Results agree to
floating-point tolerance but are not guaranteed bit-identical across the
two backends; within one backend everything is deterministic.

``benchmarks/accel_benchmark.py`` times the two paths against each other.
"""

import os

import numpy as np

NUMBA_ENABLED = os.environ.get("VQE_SMO_NUMBA", "1") != "0"

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


def kernel_matrix_numpy(a, b, gamma_sq, sigma0_sq):
    """Cross kernel matrix sigma0^2 * prod_d (g^2 + cos(a_d - b_d)) / (1 + g^2)."""
    n, d = a.shape
    m = b.shape[0]
    inv = 1.0 / (1.0 + gamma_sq)
    out = np.full((n, m), sigma0_sq)
    for k in range(d):
        out *= (gamma_sq + np.cos(a[:, k, None] - b[None, :, k])) * inv
    return out


@njit(cache=True)
def kernel_matrix_numba(a, b, gamma_sq, sigma0_sq):
    n, d = a.shape
    m = b.shape[0]
    inv = 1.0 / (1.0 + gamma_sq)
    out = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            acc = sigma0_sq
            for k in range(d):
                acc *= (gamma_sq + np.cos(a[i, k] - b[j, k])) * inv
            out[i, j] = acc
    return out


def score_pairs_numpy(cov, samples, base_min, pairs_i, pairs_j, kappa_sq, noise_var):
    """Acquisition scores for all candidate grid pairs, sharing one sample set.

    ``cov`` is the posterior covariance over the grid, ``samples`` an (S, G)
    matrix of joint posterior draws, ``base_min`` the per-sample minimum over
    the base confident region (already substituted with the fallback when that
    region is empty).  For each pair the predictive variances are reduced by a
    rank-2 update as if the pair had been observed with noise ``noise_var``;
    grid points whose reduced variance falls below ``kappa_sq`` form the
    augmented region.  When that region is empty the pair's own sampled values
    stand in as the minimum candidates.
    """
    var = np.diag(cov).copy()
    g_i = cov[:, pairs_i]          # (G, P)
    g_j = cov[:, pairs_j]
    mii = var[pairs_i] + noise_var  # (P,)
    mjj = var[pairs_j] + noise_var
    mij = cov[pairs_i, pairs_j]
    det = mii * mjj - mij * mij
    # closed-form 2x2 inverse; reduction q >= 0 analytically, clipped for fp drift
    q = (mjj * g_i**2 - 2.0 * mij * g_i * g_j + mii * g_j**2) / det
    aug_var = var[:, None] - np.clip(q, 0.0, None)  # (G, P)
    member = aug_var.T <= kappa_sq                  # (P, G)
    masked = np.where(member[:, None, :], samples[None, :, :], np.inf)
    aug_min = masked.min(axis=2)                    # (P, S)
    pair_min = np.minimum(samples[:, pairs_i], samples[:, pairs_j]).T
    empty = ~member.any(axis=1)
    if empty.any():
        aug_min = np.where(empty[:, None], pair_min, aug_min)
    imp = np.clip(base_min[None, :] - aug_min, 0.0, None)
    return imp.mean(axis=1) / 2.0


@njit(cache=True)
def score_pairs_numba(cov, samples, base_min, pairs_i, pairs_j, kappa_sq, noise_var):
    n_pairs = pairs_i.size
    n_samples, n_grid = samples.shape
    var = np.empty(n_grid)
    for g in range(n_grid):
        var[g] = cov[g, g]
    scores = np.empty(n_pairs)
    member = np.empty(n_grid, np.bool_)
    for p in range(n_pairs):
        i = pairs_i[p]
        j = pairs_j[p]
        mii = var[i] + noise_var
        mjj = var[j] + noise_var
        mij = cov[i, j]
        det = mii * mjj - mij * mij
        any_member = False
        for g in range(n_grid):
            gi = cov[g, i]
            gj = cov[g, j]
            q = (mjj * gi * gi - 2.0 * mij * gi * gj + mii * gj * gj) / det
            if q < 0.0:
                q = 0.0
            member[g] = var[g] - q <= kappa_sq
            any_member = any_member or member[g]
        acc = 0.0
        for s in range(n_samples):
            if any_member:
                lo = np.inf
                for g in range(n_grid):
                    if member[g] and samples[s, g] < lo:
                        lo = samples[s, g]
            else:
                lo = min(samples[s, i], samples[s, j])
            imp = base_min[s] - lo
            if imp > 0.0:
                acc += imp
        scores[p] = acc / (2.0 * n_samples)
    return scores


if NUMBA_ENABLED:
    kernel_matrix = kernel_matrix_numba
    score_pairs = score_pairs_numba
else:
    kernel_matrix = kernel_matrix_numpy
    score_pairs = score_pairs_numpy
