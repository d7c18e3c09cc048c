"""Sequential minimal optimization drivers.

Two per-step rules share the same outer loop: the classic rule measures
two shifted points along one coordinate and jumps to the analytic
minimum of the fitted sinusoid; the surrogate-assisted rule keeps a
Gaussian process over all measured points, picks the most informative
measurement pair on a grid along the coordinate, and fits the sinusoid
to the posterior mean instead of raw measurements.

The energy along any single circuit parameter is exactly
a1*cos(theta_d - a2) + a3, which is what makes the three-point fit and
the analytic argmin valid.
"""

from dataclasses import dataclass, field
import time

import numpy as np

from . import _accel, gp
from .errors import ConfigError
from .gp import GpModel, KernelParams
from .hamiltonian import Hamiltonian, GroundTruth, ground_state, group_terms, state_energy
from .measurement import MitigationConfig, estimate_energy
from .noise import NoiseModel
from .simulator import Ansatz, build_ansatz, prepare_state, fidelity

TWO_PI = 2.0 * np.pi
ALPHA_DEFAULT = np.pi / 3.0
AMPLITUDE_FLOOR = 1e-12
ALGORITHMS = ("nft", "emicore")


@dataclass(frozen=True)
class CosineFit:
    """value(phi) = a1*cos(phi - a2) + a3 with a1 >= 0."""

    a1: float
    a2: float
    a3: float


@dataclass
class OptimizerState:
    """Mutable per-run bookkeeping.

    direction is the zero-based coordinate index currently optimized.
    """

    theta_hat: np.ndarray
    believed_energy: float
    direction: int = 0
    step: int = 0
    measurements_used: int = 0
    history: list = field(default_factory=list)


@dataclass(frozen=True)
class CoReGrid:
    """Equally spaced angles along one coordinate with confidence mask."""

    direction: int
    angles: np.ndarray
    variances: np.ndarray
    member: np.ndarray
    kappa_sq: float


@dataclass(frozen=True)
class CandidatePair:
    first: np.ndarray
    second: np.ndarray
    acquisition: float


@dataclass(frozen=True)
class RunRecord:
    """One optimization step as persisted to CSV (wall_ms stays in memory)."""

    seed: int
    algorithm: str
    measurements: int
    believed_energy: float
    true_energy: float
    fidelity: float
    total_shots: int
    wall_ms: float


@dataclass(frozen=True)
class Problem:
    hamiltonian: Hamiltonian
    ansatz: Ansatz
    ground: GroundTruth
    groups: tuple


def build_problem(hamiltonian: Hamiltonian, layers: int) -> Problem:
    """Bundle a Hamiltonian with its ansatz, ground truth, and groups."""
    return Problem(hamiltonian, build_ansatz(hamiltonian.qubits, layers),
                   ground_state(hamiltonian), tuple(group_terms(hamiltonian)))


@dataclass(frozen=True)
class RunConfig:
    """Knobs for one optimization run; defaults match the benchmark."""

    shots_per_group: int = 1024
    noise: NoiseModel = NoiseModel()
    mitigation: MitigationConfig = MitigationConfig()
    exact_expectation: bool = False
    alpha: float = ALPHA_DEFAULT
    grid_size: int = 16
    mc_samples: int = 100
    kappa_factor: float = 1.1
    warmup_steps: int = None  # None = one full sweep (D steps)
    gamma_grid: tuple = (1.0, 2.0, 4.0, 8.0)
    stabilize_every: int = 0  # 0 = no periodic re-measurement

    def __post_init__(self):
        if self.shots_per_group < 1:
            raise ConfigError("shots_per_group must be >= 1")
        if self.grid_size < 3:
            raise ConfigError("grid_size must be >= 3")
        if self.mc_samples < 1:
            raise ConfigError("mc_samples must be >= 1")
        if self.kappa_factor <= 0.0:
            raise ConfigError("kappa_factor must be positive")
        if self.warmup_steps is not None and self.warmup_steps < 0:
            raise ConfigError("warmup_steps must be nonnegative")
        if self.stabilize_every < 0:
            raise ConfigError("stabilize_every must be nonnegative")
        if self.alpha <= 0.0 or self.alpha >= np.pi:
            raise ConfigError("alpha must lie in (0, pi)")


def cosine_value(fit: CosineFit, angle: float) -> float:
    return fit.a1 * np.cos(angle - fit.a2) + fit.a3


def cosine_fit(points) -> CosineFit:
    """Invert three (angle, value) samples of a shifted cosine.

    Exact on sinusoidal data; angles must be distinct modulo 2*pi.
    """
    pts = list(points)
    if len(pts) != 3:
        raise ValueError("cosine fit needs exactly 3 points")
    angles = np.array([p[0] for p in pts], dtype=float)
    values = np.array([p[1] for p in pts], dtype=float)
    design = np.column_stack([np.cos(angles), np.sin(angles), np.ones(3)])
    if abs(np.linalg.det(design)) < 1e-9:
        raise ValueError("fit angles are degenerate modulo 2*pi")
    c = np.linalg.solve(design, values)
    a1 = float(np.hypot(c[0], c[1]))
    a2 = float(np.arctan2(c[1], c[0]) % TWO_PI) if a1 > 0.0 else 0.0
    return CosineFit(a1, a2, float(c[2]))


def argmin_cosine(fit: CosineFit, current_angle: float = 0.0) -> float:
    """Analytic minimizer; a flat fit keeps the current angle."""
    if fit.a1 <= AMPLITUDE_FLOOR:
        return float(current_angle % TWO_PI)
    return float((fit.a2 + np.pi) % TWO_PI)


def nft_step(state: OptimizerState, measure, alpha: float = ALPHA_DEFAULT,
             collector=None) -> OptimizerState:
    """One coordinate update from two shifted measurements.

    The center value is the chained believed_energy, not a fresh
    measurement; the new believed_energy is the fitted minimum value.
    collector(point, estimate) observes both measurements when given.
    """
    d = state.direction
    center = state.theta_hat[d]
    lo = state.theta_hat.copy()
    lo[d] = (center - alpha) % TWO_PI
    hi = state.theta_hat.copy()
    hi[d] = (center + alpha) % TWO_PI
    est_lo = measure(lo)
    est_hi = measure(hi)
    if collector is not None:
        collector(lo, est_lo)
        collector(hi, est_hi)
    fit3 = cosine_fit([(center - alpha, est_lo.value),
                       (center, state.believed_energy),
                       (center + alpha, est_hi.value)])
    state.theta_hat[d] = argmin_cosine(fit3, center)
    state.believed_energy = fit3.a3 - fit3.a1
    state.measurements_used += 2
    state.direction = (d + 1) % state.theta_hat.size
    state.step += 1
    return state


def _embed_angles(theta_hat: np.ndarray, direction: int, angles: np.ndarray) -> np.ndarray:
    points = np.tile(theta_hat, (angles.size, 1))
    points[:, direction] = angles
    return points


def grid_angles(grid_size: int) -> np.ndarray:
    return TWO_PI * np.arange(grid_size) / grid_size


def build_core(model: GpModel, theta_hat, direction: int, grid_size: int,
               kappa_sq: float) -> CoReGrid:
    """Confident-region mask on the coordinate grid through theta_hat."""
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    angles = grid_angles(grid_size)
    points = _embed_angles(np.asarray(theta_hat, dtype=float), direction, angles)
    variances = gp.posterior_var(model, points)
    return CoReGrid(direction, angles, variances, variances <= kappa_sq, kappa_sq)


def _sample_root(cov: np.ndarray) -> np.ndarray:
    """Symmetric square root of a covariance, tiny eigenvalues zeroed."""
    evals, evecs = np.linalg.eigh(0.5 * (cov + cov.T))
    evals = np.clip(evals, 0.0, None)
    evals[evals < 1e-12] = 0.0
    return (evecs * np.sqrt(evals)) @ evecs.T


def draw_posterior_samples(mean: np.ndarray, cov: np.ndarray, count: int,
                           rng: np.random.Generator) -> np.ndarray:
    """count joint draws from N(mean, cov), one row per draw."""
    root = _sample_root(cov)
    return mean[None, :] + rng.standard_normal((count, mean.size)) @ root


def _effective_noise(model: GpModel) -> float:
    """Likelihood variance in original (unstandardized) energy units."""
    return model.params.effective_noise * model.scale**2


def emicore_acquisition(model: GpModel, pair: CandidatePair, grid: CoReGrid,
                        samples: int, rng: np.random.Generator,
                        fallback_min: float = None) -> float:
    """Expected drop of the confident-region minimum if the pair were
    measured, halved per new measurement (Monte-Carlo estimate).

    The pair's own points always enter the augmented-region check; with
    an empty base region fallback_min stands in for the base minimum.
    """
    if samples < 1:
        raise ValueError("sample count must be >= 1")
    base = np.asarray(pair.first, dtype=float).copy()
    joint = np.vstack([_embed_angles(base, grid.direction, grid.angles),
                       pair.first, pair.second])
    mean, cov = gp.posterior(model, joint)
    draws = draw_posterior_samples(mean, cov, samples, rng)
    n_grid = grid.angles.size
    if grid.member.any():
        base_min = draws[:, :n_grid][:, grid.member].min(axis=1)
    elif fallback_min is not None:
        base_min = np.full(samples, float(fallback_min))
    else:
        raise ValueError("empty base region requires fallback_min")
    scores = _accel.score_pairs(
        cov, draws, base_min,
        np.array([n_grid], dtype=np.int64), np.array([n_grid + 1], dtype=np.int64),
        grid.kappa_sq, _effective_noise(model))
    return float(scores[0])


def select_pair(model: GpModel, theta_hat, direction: int, grid_size: int,
                kappa_sq: float, samples: int, rng: np.random.Generator,
                fallback_min: float) -> CandidatePair:
    """Score every unordered grid pair on one shared sample set.

    Ties resolve to the lexicographically first pair (smaller first
    angle, then smaller second angle).
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    angles = grid_angles(grid_size)
    points = _embed_angles(theta_hat, direction, angles)
    mean, cov = gp.posterior(model, points)
    member = np.diagonal(cov) <= kappa_sq
    draws = draw_posterior_samples(mean, cov, samples, rng)
    if member.any():
        base_min = draws[:, member].min(axis=1)
    else:
        base_min = np.full(samples, float(fallback_min))
    pairs_i, pairs_j = np.triu_indices(grid_size, k=1)
    scores = _accel.score_pairs(cov, draws, base_min,
                                pairs_i.astype(np.int64), pairs_j.astype(np.int64),
                                kappa_sq, _effective_noise(model))
    best = int(np.argmax(scores))
    return CandidatePair(points[pairs_i[best]].copy(), points[pairs_j[best]].copy(),
                         float(scores[best]))


def emicore_step(state: OptimizerState, model: GpModel, measure,
                 grid_size: int, kappa_sq: float, samples: int,
                 rng: np.random.Generator) -> tuple:
    """One surrogate-assisted coordinate update.

    Measures the selected pair, extends the GP, fits the coordinate
    sinusoid through the posterior mean at three equidistant angles, and
    moves to its argmin.
    """
    d = state.direction
    pair = select_pair(model, state.theta_hat, d, grid_size, kappa_sq,
                       samples, rng, fallback_min=state.believed_energy)
    est_a = measure(pair.first)
    est_b = measure(pair.second)
    model = gp.extend(model, np.vstack([pair.first, pair.second]),
                      [est_a.value, est_b.value])
    center = state.theta_hat[d]
    fit_angles = center + np.array([0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0])
    fit_points = _embed_angles(state.theta_hat, d, fit_angles)
    fit_means = gp.posterior_mean(model, fit_points)
    fit3 = cosine_fit(zip(fit_angles, fit_means))
    state.theta_hat[d] = argmin_cosine(fit3, center)
    state.believed_energy = float(
        gp.posterior_mean(model, state.theta_hat[None, :])[0])
    state.measurements_used += 2
    state.direction = (d + 1) % state.theta_hat.size
    state.step += 1
    return state, model


def _restandardize(model: GpModel) -> GpModel:
    """Recenter the surrogate's affine target map on its accumulated data.

    The running shift keeps the zero-mean prior centered on the energies
    actually observed, so late-phase posterior means are not dragged
    toward the (higher) warm-up average.  The likelihood variance is held
    fixed in energy units; only its standardized value is rescaled.
    """
    values = model.targets
    shift = float(values.mean())
    spread = float(values.std())
    scale = spread if spread > 1e-12 else 1.0
    noise_var = model.params.noise_var * model.scale**2 / scale**2
    params = KernelParams(model.params.sigma0_sq, model.params.gamma_sq,
                          noise_var)
    return gp.fit(model.inputs, model.targets, params, shift=shift,
                  scale=scale)


def _init_surrogate(inputs, values, errors, config: RunConfig):
    """Standardize warm-up targets and pick the kernel smoothness.

    The smoothness and the energy-unit likelihood variance stay fixed for
    the rest of the run; the affine standardization keeps running via
    _restandardize as data accumulate.
    """
    inputs = np.asarray(inputs, dtype=float)
    values = np.asarray(values, dtype=float)
    shift = float(values.mean())
    spread = float(values.std())
    scale = spread if spread > 1e-12 else 1.0
    noise_var_std = max(float(np.mean(np.square(errors))) / scale**2,
                        gp.NOISE_FLOOR)
    candidates = [KernelParams(1.0, g, noise_var_std) for g in config.gamma_grid]
    chosen = gp.select_hyperparams(inputs, (values - shift) / scale, candidates)
    model = gp.fit(inputs, values, chosen, shift=shift, scale=scale)
    kappa_sq = config.kappa_factor * noise_var_std * scale**2
    return model, kappa_sq


def run(algorithm: str, problem: Problem, budget: int,
        config: RunConfig = RunConfig(), seed: int = 0,
        on_record=None) -> list:
    """Full seeded optimization run; returns one RunRecord per step.

    The run seed splits into three independent streams (initialization,
    measurement sampling, acquisition sampling) so acquisition settings
    never perturb the measurement noise realizations.  The initial-point
    measurement seeds believed_energy without counting toward budget, so
    a budget of 600 yields 300 two-measurement steps.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if budget < 2:
        raise ValueError("budget must be >= 2")
    ansatz = problem.ansatz
    dims = ansatz.param_count
    warmup = config.warmup_steps if config.warmup_steps is not None else dims
    init_seq, meas_seq, acq_seq = np.random.SeedSequence(seed).spawn(3)
    init_rng = np.random.default_rng(init_seq)
    meas_rng = np.random.default_rng(meas_seq)
    acq_rng = np.random.default_rng(acq_seq)

    total_shots = 0

    def measure(point):
        nonlocal total_shots
        est = estimate_energy(ansatz, point, problem.hamiltonian,
                              config.shots_per_group, config.noise,
                              config.mitigation, meas_rng,
                              groups=problem.groups,
                              exact=config.exact_expectation)
        total_shots += est.shots_used
        return est

    theta = init_rng.uniform(0.0, TWO_PI, dims)
    seed_estimate = measure(theta)
    state = OptimizerState(theta, seed_estimate.value)

    surrogate_inputs = [theta.copy()]
    surrogate_values = [seed_estimate.value]
    surrogate_errors = [seed_estimate.std_error]

    def collect(point, estimate):
        surrogate_inputs.append(np.array(point))
        surrogate_values.append(estimate.value)
        surrogate_errors.append(estimate.std_error)

    model = None
    kappa_sq = None
    while state.measurements_used + 2 <= budget:
        t_start = time.perf_counter()
        if algorithm == "nft":
            nft_step(state, measure, alpha=config.alpha)
            if (config.stabilize_every > 0
                    and state.step % config.stabilize_every == 0
                    and state.measurements_used + 1 <= budget):
                refreshed = measure(state.theta_hat.copy())
                state.believed_energy = refreshed.value
                state.measurements_used += 1
        elif state.step < warmup:
            nft_step(state, measure, alpha=config.alpha, collector=collect)
        else:
            if model is None:
                model, kappa_sq = _init_surrogate(
                    surrogate_inputs, surrogate_values, surrogate_errors, config)
            state, model = emicore_step(state, model, measure,
                                        config.grid_size, kappa_sq,
                                        config.mc_samples, acq_rng)
            model = _restandardize(model)
            state.believed_energy = float(
                gp.posterior_mean(model, state.theta_hat[None, :])[0])
        wall_ms = (time.perf_counter() - t_start) * 1000.0
        ideal = prepare_state(ansatz, state.theta_hat)
        record = RunRecord(seed, algorithm, state.measurements_used,
                           float(state.believed_energy),
                           state_energy(problem.hamiltonian, ideal),
                           fidelity(ideal, problem.ground),
                           total_shots, wall_ms)
        state.history.append(record)
        if on_record is not None:
            on_record(record)
    return state.history
