"""Time the compiled numeric kernels against the pure-numpy fallback.

Run as ``python benchmarks/accel_benchmark.py``.  Both code paths are timed
directly regardless of the VQE_SMO_NUMBA setting; the flag only decides which
one the optimizer picks up at import time.
"""

import time

import numpy as np

from vqe_smo import _accel


def _time(func, *args, repeats=5):
    func(*args)  # warm-up: triggers JIT compilation on the numba path
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        func(*args)
        best = min(best, time.perf_counter() - start)
    return best


def _kernel_case(rng, n, m, d):
    a = rng.uniform(0.0, 2.0 * np.pi, size=(n, d))
    b = rng.uniform(0.0, 2.0 * np.pi, size=(m, d))
    return a, b, 2.0, 1.0


def _scoring_case(rng, n_grid, n_samples, n_pairs):
    root = rng.normal(size=(n_grid, n_grid + 8)) / np.sqrt(n_grid)
    cov = root @ root.T
    samples = rng.multivariate_normal(np.zeros(n_grid), cov, size=n_samples,
                                      method="cholesky")
    base_min = samples[:, : n_grid // 2].min(axis=1)
    pairs_i, pairs_j = np.triu_indices(n_grid, k=1)
    keep = rng.choice(pairs_i.size, size=min(n_pairs, pairs_i.size),
                      replace=False)
    return cov, samples, base_min, pairs_i[keep], pairs_j[keep], 0.05, 1e-3


def main():
    rng = np.random.default_rng(0)
    print(f"numba available: {_accel.NUMBA_ENABLED}")
    rows = []

    for n, m, d in [(64, 64, 9), (256, 256, 18), (512, 2048, 30)]:
        args = _kernel_case(rng, n, m, d)
        t_np = _time(_accel.kernel_matrix_numpy, *args)
        label = f"kernel_matrix {n}x{m}, D={d}"
        if _accel.NUMBA_ENABLED:
            t_nb = _time(_accel.kernel_matrix_numba, *args)
            check = np.allclose(_accel.kernel_matrix_numba(*args),
                                _accel.kernel_matrix_numpy(*args))
            rows.append((label, t_np, t_nb, check))
        else:
            rows.append((label, t_np, None, True))

    for n_grid, n_samples, n_pairs in [(64, 100, 64), (128, 100, 128),
                                       (128, 400, 512)]:
        args = _scoring_case(rng, n_grid, n_samples, n_pairs)
        t_np = _time(_accel.score_pairs_numpy, *args)
        label = f"score_pairs G={n_grid}, S={n_samples}, P={len(args[3])}"
        if _accel.NUMBA_ENABLED:
            t_nb = _time(_accel.score_pairs_numba, *args)
            check = np.allclose(_accel.score_pairs_numba(*args),
                                _accel.score_pairs_numpy(*args))
            rows.append((label, t_np, t_nb, check))
        else:
            rows.append((label, t_np, None, True))

    width = max(len(r[0]) for r in rows)
    print(f"{'case':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}  agree")
    for label, t_np, t_nb, check in rows:
        if t_nb is None:
            print(f"{label:<{width}}  {t_np * 1e3:>8.2f}ms  {'-':>10}  "
                  f"{'-':>8}  {'-'}")
        else:
            print(f"{label:<{width}}  {t_np * 1e3:>8.2f}ms  "
                  f"{t_nb * 1e3:>8.2f}ms  {t_np / t_nb:>7.1f}x  "
                  f"{'yes' if check else 'NO'}")


if __name__ == "__main__":
    main()
