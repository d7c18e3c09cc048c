"""Noisy energy estimation with optional readout twirling and noise
extrapolation.

One "measurement" in the budget sense is one parameter vector evaluated
with shots_per_group shots on every commuting group.  Mitigation overhead
(calibration shots, extra noise scales) is charged to shots_used so both
budget conventions stay visible downstream.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, MitigationError
from .hamiltonian import Hamiltonian, group_terms, state_energy, density_energy
from .noise import NoiseModel
from .simulator import (Ansatz, prepare_state, prepare_density, group_distribution,
                        sample_outcomes, apply_readout_noise, parity_signs)

ATTENUATION_FLOOR = 0.05

_MODES = ("none", "trex", "zne")


@dataclass(frozen=True)
class EnergyEstimate:
    value: float
    std_error: float
    shots_used: int
    groups: int


@dataclass(frozen=True)
class MitigationConfig:
    """Which mitigation runs and with what knobs.

    trex_randomizations None means a fresh flip mask per shot.
    """

    mode: str = "none"
    zne_scales: tuple = (1.0, 2.0, 3.0)
    zne_order: int = 1
    trex_randomizations: int = None

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ConfigError(f"unknown mitigation mode {self.mode!r}")
        scales = tuple(float(s) for s in self.zne_scales)
        object.__setattr__(self, "zne_scales", scales)
        if not scales or scales[0] != 1.0:
            raise ConfigError("zne_scales must start at 1")
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise ConfigError("zne_scales must be strictly increasing")
        if not 0 <= self.zne_order < len(scales):
            raise ConfigError("zne_order must be < len(zne_scales)")
        if self.trex_randomizations is not None and self.trex_randomizations < 1:
            raise ConfigError("trex_randomizations must be positive")

    def to_dict(self) -> dict:
        return {"mode": self.mode, "zne_scales": list(self.zne_scales),
                "zne_order": self.zne_order,
                "trex_randomizations": self.trex_randomizations}

    @classmethod
    def from_dict(cls, data: dict) -> "MitigationConfig":
        allowed = {"mode", "zne_scales", "zne_order", "trex_randomizations"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown mitigation field(s): {', '.join(sorted(unknown))}")
        return cls(**data)


def _prepare(ansatz: Ansatz, theta, noise: NoiseModel):
    if noise.has_gate_noise:
        return prepare_density(ansatz, theta, noise)
    return prepare_state(ansatz, theta)


def _exact_estimate(ansatz, theta, hamiltonian, noise, groups) -> EnergyEstimate:
    state = _prepare(ansatz, theta, noise)
    if state.ndim == 1:
        value = state_energy(hamiltonian, state)
    else:
        value = density_energy(hamiltonian, state)
    return EnergyEstimate(value, 0.0, 0, len(groups))


def measure_energy(ansatz: Ansatz, theta, hamiltonian: Hamiltonian,
                   shots_per_group: int, noise: NoiseModel,
                   rng: np.random.Generator, groups=None,
                   exact: bool = False) -> EnergyEstimate:
    """Sampled energy estimate over qubit-wise commuting groups.

    Per-shot weighted parity sums within each group capture the
    correlations between terms that share shots, so std_error reflects
    the true estimator variance rather than assuming term independence.
    exact=True bypasses sampling and returns the infinite-shot value.
    """
    if shots_per_group < 1:
        raise ValueError("shots_per_group must be >= 1")
    if groups is None:
        groups = group_terms(hamiltonian)
    if exact:
        return _exact_estimate(ansatz, theta, hamiltonian, noise, groups)
    state = _prepare(ansatz, theta, noise)
    qubits = hamiltonian.qubits
    value = 0.0
    variance = 0.0
    for group in groups:
        probs = group_distribution(state, group.basis)
        outcomes = sample_outcomes(probs, shots_per_group, rng)
        outcomes = apply_readout_noise(outcomes, qubits, noise.readout_01,
                                       noise.readout_10, rng)
        per_shot = np.zeros(shots_per_group)
        for ti in group.member_terms:
            term = hamiltonian.terms[ti]
            if term.support_mask == 0:
                value += term.coefficient
                continue
            per_shot += term.coefficient * parity_signs(outcomes, term.support_mask)
        value += per_shot.mean()
        if shots_per_group > 1:
            variance += per_shot.var(ddof=1) / shots_per_group
    return EnergyEstimate(float(value), float(np.sqrt(variance)),
                          shots_per_group * len(groups), len(groups))


def _trex_calibration(qubits: int, shots: int, noise: NoiseModel,
                      rng: np.random.Generator) -> np.ndarray:
    """Per-qubit readout attenuation from |0..0> and |1..1> runs."""
    flips0 = rng.random((shots, qubits)) < noise.readout_01
    read0_correct = 1.0 - flips0.mean(axis=0)
    flips1 = rng.random((shots, qubits)) < noise.readout_10
    read1_correct = 1.0 - flips1.mean(axis=0)
    return read0_correct + read1_correct - 1.0


def measure_energy_trex(ansatz: Ansatz, theta, hamiltonian: Hamiltonian,
                        shots_per_group: int, noise: NoiseModel,
                        rng: np.random.Generator, groups=None,
                        randomizations: int = None,
                        exact: bool = False) -> EnergyEstimate:
    """Readout-twirled estimate: random bit flips symmetrize the readout
    channel into a pure attenuation, which is divided out per term.

    Attenuation factors come from calibration runs on the all-zeros and
    all-ones states; those 2 x shots_per_group shots are charged to
    shots_used.  Exact mode bypasses sampling and readout entirely.
    """
    if shots_per_group < 1:
        raise ValueError("shots_per_group must be >= 1")
    if groups is None:
        groups = group_terms(hamiltonian)
    if exact:
        return _exact_estimate(ansatz, theta, hamiltonian, noise, groups)
    qubits = hamiltonian.qubits
    f_qubit = _trex_calibration(qubits, shots_per_group, noise, rng)
    f_term = {}
    for ti, term in enumerate(hamiltonian.terms):
        f = 1.0
        for pos in range(qubits):
            if term.support_mask & (1 << (qubits - 1 - pos)):
                f *= f_qubit[pos]
        if term.support_mask and f < ATTENUATION_FLOOR:
            raise MitigationError(
                f"attenuation {f:.4f} for term {term.label(qubits)} below "
                f"{ATTENUATION_FLOOR}; refusing to amplify noise")
        f_term[ti] = f
    state = _prepare(ansatz, theta, noise)
    dim = 2**qubits
    value = 0.0
    variance = 0.0
    for group in groups:
        probs = group_distribution(state, group.basis)
        outcomes = sample_outcomes(probs, shots_per_group, rng)
        if randomizations is None:
            masks = rng.integers(0, dim, size=shots_per_group, dtype=np.int64)
        else:
            unique = rng.integers(0, dim, size=randomizations, dtype=np.int64)
            masks = np.resize(unique, shots_per_group)
        noisy = apply_readout_noise(outcomes ^ masks, qubits, noise.readout_01,
                                    noise.readout_10, rng)
        recorded = noisy ^ masks
        per_shot = np.zeros(shots_per_group)
        for ti in group.member_terms:
            term = hamiltonian.terms[ti]
            if term.support_mask == 0:
                value += term.coefficient
                continue
            signs = parity_signs(recorded, term.support_mask)
            per_shot += (term.coefficient / f_term[ti]) * signs
        value += per_shot.mean()
        if shots_per_group > 1:
            variance += per_shot.var(ddof=1) / shots_per_group
    shots_used = shots_per_group * len(groups) + 2 * shots_per_group
    return EnergyEstimate(float(value), float(np.sqrt(variance)),
                          shots_used, len(groups))


def zne_weights(scales, order: int) -> np.ndarray:
    """Least-squares extrapolation weights: value at zero noise is w . y."""
    scales = np.asarray(scales, dtype=float)
    vander = np.vander(scales, N=order + 1, increasing=True)
    gram = vander.T @ vander
    return np.linalg.solve(gram, vander.T)[0]


def measure_energy_zne(ansatz: Ansatz, theta, hamiltonian: Hamiltonian,
                       shots_per_group: int, noise: NoiseModel,
                       config: MitigationConfig, rng: np.random.Generator,
                       groups=None, exact: bool = False) -> EnergyEstimate:
    """Zero-noise extrapolation over amplified copies of the noise model.

    Gate-noise probabilities are scaled directly (readout is untouched) and
    a polynomial in the scale factor is extrapolated to zero.
    """
    if config.mode != "zne":
        raise ValueError("mitigation config mode must be 'zne'")
    if noise.scale != 1.0:
        raise ValueError("noise model already scaled; ZNE needs scale = 1")
    if groups is None:
        groups = group_terms(hamiltonian)
    values = []
    errors = []
    shots_used = 0
    for lam in config.zne_scales:
        est = measure_energy(ansatz, theta, hamiltonian, shots_per_group,
                             noise.scaled(lam), rng, groups=groups, exact=exact)
        values.append(est.value)
        errors.append(est.std_error)
        shots_used += est.shots_used
    w = zne_weights(config.zne_scales, config.zne_order)
    value = float(w @ np.asarray(values))
    std_error = float(np.sqrt(np.sum((w * np.asarray(errors)) ** 2)))
    return EnergyEstimate(value, std_error, shots_used, len(groups))


def estimate_energy(ansatz: Ansatz, theta, hamiltonian: Hamiltonian,
                    shots_per_group: int, noise: NoiseModel,
                    mitigation: MitigationConfig, rng: np.random.Generator,
                    groups=None, exact: bool = False) -> EnergyEstimate:
    """Dispatch to the configured estimator."""
    if mitigation.mode == "none":
        return measure_energy(ansatz, theta, hamiltonian, shots_per_group,
                              noise, rng, groups=groups, exact=exact)
    if mitigation.mode == "trex":
        return measure_energy_trex(ansatz, theta, hamiltonian, shots_per_group,
                                   noise, rng, groups=groups,
                                   randomizations=mitigation.trex_randomizations,
                                   exact=exact)
    return measure_energy_zne(ansatz, theta, hamiltonian, shots_per_group,
                              noise, mitigation, rng, groups=groups, exact=exact)
