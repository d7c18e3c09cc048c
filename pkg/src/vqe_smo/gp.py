"""Gaussian-process regression with the product-of-cosines kernel.

The kernel k(t, t') = s0 * prod_d (g + cos(t_d - t'_d)) / (1 + g) spans
exactly the trigonometric-polynomial family the circuit energy lives in,
so a GP with this prior can interpolate the landscape from few points.

Targets may be standardized through an affine map (shift, scale) recorded
in the model; posterior statistics are always returned in original units.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _accel

NOISE_FLOOR = 1e-10
_JITTER_FACTOR = 1e-8


@dataclass(frozen=True)
class KernelParams:
    sigma0_sq: float
    gamma_sq: float
    noise_var: float

    def __post_init__(self):
        if self.sigma0_sq <= 0.0:
            raise ValueError("sigma0_sq must be positive")
        if self.gamma_sq < 1.0:
            raise ValueError("gamma_sq must be >= 1")
        if self.noise_var < 0.0:
            raise ValueError("noise_var must be nonnegative")

    @property
    def effective_noise(self) -> float:
        """Likelihood variance floored to keep solves well-posed."""
        return max(self.noise_var, NOISE_FLOOR)


@dataclass(frozen=True)
class GpModel:
    """Training data plus cached Cholesky factor and weight vector.

    alpha solves (K + noise I) alpha = standardized targets.  Immutable;
    extend() returns a new model.
    """

    inputs: np.ndarray
    targets: np.ndarray
    params: KernelParams
    shift: float
    scale: float
    chol: np.ndarray
    alpha: np.ndarray

    @property
    def count(self) -> int:
        return self.inputs.shape[0]

    def standardized_targets(self) -> np.ndarray:
        return (self.targets - self.shift) / self.scale


def vqe_kernel(theta_a, theta_b, params: KernelParams) -> float:
    a = np.asarray(theta_a, dtype=float)
    b = np.asarray(theta_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("parameter vectors must share one length")
    g = params.gamma_sq
    return float(params.sigma0_sq * np.prod((g + np.cos(a - b)) / (1.0 + g)))


def kernel_matrix(xa: np.ndarray, xb: np.ndarray, params: KernelParams) -> np.ndarray:
    return _accel.kernel_matrix(np.ascontiguousarray(xa, dtype=np.float64),
                                np.ascontiguousarray(xb, dtype=np.float64),
                                params.gamma_sq, params.sigma0_sq)


def feature_map(theta, params: KernelParams) -> np.ndarray:
    """Explicit features whose inner product reproduces the kernel."""
    theta = np.asarray(theta, dtype=float)
    d = theta.size
    g = np.sqrt(params.gamma_sq)
    vec = np.array([1.0])
    for t in theta:
        vec = np.kron(vec, np.array([g, np.cos(t), np.sin(t)]))
    return np.sqrt(params.sigma0_sq) * (1.0 + params.gamma_sq) ** (-d / 2.0) * vec


def _chol_with_jitter(mat: np.ndarray, sigma0_sq: float) -> np.ndarray:
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        jitter = _JITTER_FACTOR * sigma0_sq
        return np.linalg.cholesky(mat + jitter * np.eye(mat.shape[0]))


def fit(inputs, targets, params: KernelParams, shift: float = 0.0,
        scale: float = 1.0) -> GpModel:
    """Exact GP fit with zero prior mean on standardized targets."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    targets = np.asarray(targets, dtype=float).reshape(-1)
    if inputs.shape[0] != targets.shape[0]:
        raise ValueError("inputs and targets disagree on N")
    n = inputs.shape[0]
    if n == 0:
        return GpModel(inputs.reshape(0, inputs.shape[1] if inputs.ndim == 2 else 0),
                       targets, params, shift, scale,
                       np.zeros((0, 0)), np.zeros(0))
    kmat = kernel_matrix(inputs, inputs, params)
    kmat[np.diag_indices(n)] += params.effective_noise
    chol = _chol_with_jitter(kmat, params.sigma0_sq)
    y = (targets - shift) / scale
    alpha = scipy.linalg.solve_triangular(
        chol, scipy.linalg.solve_triangular(chol, y, lower=True),
        lower=True, trans="T")
    return GpModel(inputs, targets, params, shift, scale, chol, alpha)


def extend(model: GpModel, new_inputs, new_targets) -> GpModel:
    """Add points via a block Cholesky update; matches a full refit."""
    new_inputs = np.atleast_2d(np.asarray(new_inputs, dtype=float))
    new_targets = np.asarray(new_targets, dtype=float).reshape(-1)
    if model.count == 0:
        return fit(new_inputs, new_targets, model.params,
                   shift=model.shift, scale=model.scale)
    params = model.params
    cross = kernel_matrix(model.inputs, new_inputs, params)
    corner = kernel_matrix(new_inputs, new_inputs, params)
    corner[np.diag_indices(corner.shape[0])] += params.effective_noise
    x = scipy.linalg.solve_triangular(model.chol, cross, lower=True)
    schur = corner - x.T @ x
    chol_corner = _chol_with_jitter(schur, params.sigma0_sq)
    n, k = model.count, new_inputs.shape[0]
    chol = np.zeros((n + k, n + k))
    chol[:n, :n] = model.chol
    chol[n:, :n] = x.T
    chol[n:, n:] = chol_corner
    inputs = np.vstack([model.inputs, new_inputs])
    targets = np.concatenate([model.targets, new_targets])
    y = (targets - model.shift) / model.scale
    alpha = scipy.linalg.solve_triangular(
        chol, scipy.linalg.solve_triangular(chol, y, lower=True),
        lower=True, trans="T")
    return GpModel(inputs, targets, params, model.shift, model.scale, chol, alpha)


def posterior(model: GpModel, test_inputs) -> tuple:
    """Posterior mean vector and covariance matrix in original units."""
    test = np.atleast_2d(np.asarray(test_inputs, dtype=float))
    m = test.shape[0]
    params = model.params
    prior_cov = kernel_matrix(test, test, params)
    if model.count == 0:
        mean = np.full(m, model.shift)
        cov = prior_cov * model.scale**2
        return mean, cov
    cross = kernel_matrix(model.inputs, test, params)
    v = scipy.linalg.solve_triangular(model.chol, cross, lower=True)
    mean_std = cross.T @ model.alpha
    cov_std = prior_cov - v.T @ v
    cov_std = 0.5 * (cov_std + cov_std.T)
    diag = np.clip(np.diagonal(cov_std), 0.0, None)
    np.fill_diagonal(cov_std, diag)
    return model.shift + model.scale * mean_std, cov_std * model.scale**2


def posterior_mean(model: GpModel, test_inputs) -> np.ndarray:
    test = np.atleast_2d(np.asarray(test_inputs, dtype=float))
    if model.count == 0:
        return np.full(test.shape[0], model.shift)
    cross = kernel_matrix(model.inputs, test, model.params)
    return model.shift + model.scale * (cross.T @ model.alpha)


def posterior_var(model: GpModel, test_inputs) -> np.ndarray:
    """Predictive variances only; diagonal shortcut (k(t,t) = sigma0_sq)."""
    test = np.atleast_2d(np.asarray(test_inputs, dtype=float))
    prior_diag = np.full(test.shape[0], model.params.sigma0_sq)
    if model.count == 0:
        return prior_diag * model.scale**2
    cross = kernel_matrix(model.inputs, test, model.params)
    v = scipy.linalg.solve_triangular(model.chol, cross, lower=True)
    var = prior_diag - np.sum(v**2, axis=0)
    return np.clip(var, 0.0, None) * model.scale**2


def log_marginal_likelihood(model: GpModel) -> float:
    """Exact Gaussian evidence of the standardized targets."""
    if model.count == 0:
        return 0.0
    y = model.standardized_targets()
    return float(-0.5 * y @ model.alpha
                 - np.sum(np.log(np.diagonal(model.chol)))
                 - 0.5 * model.count * np.log(2.0 * np.pi))


def select_hyperparams(inputs, targets, candidates) -> KernelParams:
    """Best candidate by marginal likelihood.

    Ties go to the smallest gamma_sq, then the smallest sigma0_sq.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("candidate grid is empty")
    best = None
    best_key = None
    failures = []
    for cand in candidates:
        try:
            lml = log_marginal_likelihood(fit(inputs, targets, cand))
        except np.linalg.LinAlgError as exc:
            failures.append(exc)
            continue
        key = (-lml, cand.gamma_sq, cand.sigma0_sq)
        if best_key is None or key < best_key:
            best, best_key = cand, key
    if best is None:
        raise np.linalg.LinAlgError("all hyperparameter candidates failed to fit")
    return best
