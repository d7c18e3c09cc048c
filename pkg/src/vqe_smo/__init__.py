"""Sequential minimal optimization for variational quantum eigensolvers.

Builds Pauli-string Hamiltonians, simulates hardware-efficient circuits
with optional depolarizing/readout noise, estimates energies from shots
(with readout twirling and zero-noise extrapolation available), and
optimizes parameters one coordinate at a time, either with the classic
three-point sinusoid rule or with a Gaussian-process surrogate that
picks maximally informative measurement pairs.
"""

from . import gp, harness, optimize
from .errors import ConfigError, MitigationError
from .hamiltonian import (GroundTruth, Hamiltonian, MeasurementGroup, PauliTerm,
                          build_heisenberg, critical_ising, ground_state,
                          group_terms, state_energy, to_dense)
from .measurement import (EnergyEstimate, MitigationConfig, estimate_energy,
                          measure_energy, measure_energy_trex, measure_energy_zne)
from .noise import NoiseModel
from .optimize import (CandidatePair, CoReGrid, CosineFit, OptimizerState,
                       Problem, RunConfig, RunRecord, argmin_cosine,
                       build_ansatz, build_core, build_problem, cosine_fit,
                       emicore_acquisition, emicore_step, nft_step, run,
                       select_pair)
from .simulator import (Ansatz, exact_energy, fidelity, prepare_density,
                        prepare_state, sample_counts)

__version__ = "0.1.0"

__all__ = [
    "Ansatz", "CandidatePair", "ConfigError", "CoReGrid", "CosineFit",
    "EnergyEstimate", "GroundTruth", "Hamiltonian", "MeasurementGroup",
    "MitigationConfig", "MitigationError", "NoiseModel", "OptimizerState",
    "PauliTerm", "Problem", "RunConfig", "RunRecord", "argmin_cosine",
    "build_ansatz", "build_core", "build_heisenberg", "build_problem",
    "cosine_fit", "critical_ising", "emicore_acquisition", "emicore_step",
    "estimate_energy", "exact_energy", "fidelity", "gp", "ground_state",
    "group_terms", "harness", "measure_energy", "measure_energy_trex",
    "measure_energy_zne", "nft_step", "optimize", "prepare_density",
    "prepare_state", "run", "sample_counts", "select_pair", "state_energy",
    "to_dense",
]
