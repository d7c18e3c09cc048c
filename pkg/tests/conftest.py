"""Shared fixtures for the test suite.

The comparative benchmark sweeps (10 seeded runs per algorithm per noise
regime on the 5-qubit problem) dominate the suite's runtime, so they are
session scoped and computed once; the acceptance tests that compare
algorithms all read from the same set of runs.
"""

import numpy as np
import pytest

from vqe_smo.hamiltonian import critical_ising
from vqe_smo.measurement import MitigationConfig
from vqe_smo.noise import NoiseModel
from vqe_smo.optimize import RunConfig, build_problem, run

SEEDS = tuple(range(10))
BUDGET = 600


@pytest.fixture(scope="session")
def ising5():
    return build_problem(critical_ising(5), layers=3)


@pytest.fixture(scope="session")
def ising3():
    return build_problem(critical_ising(3), layers=1)


def _final_records(problem, config, seeds=SEEDS, budget=BUDGET):
    out = {}
    for algo in ("nft", "emicore"):
        out[algo] = [run(algo, problem, budget=budget, config=config, seed=s)[-1]
                     for s in seeds]
    return out


@pytest.fixture(scope="session")
def shot_noise_sweep(ising5):
    """Finite shots, no hardware noise."""
    return _final_records(ising5, RunConfig(shots_per_group=1024))


@pytest.fixture(scope="session")
def hardware_noise_sweep(ising5):
    return _final_records(
        ising5, RunConfig(shots_per_group=1024, noise=NoiseModel.preset()))


@pytest.fixture(scope="session")
def trex_sweep(ising5):
    return _final_records(
        ising5, RunConfig(shots_per_group=1024, noise=NoiseModel.preset(),
                          mitigation=MitigationConfig(mode="trex")))


@pytest.fixture(scope="session")
def zne_sweep(ising5):
    return _final_records(
        ising5, RunConfig(shots_per_group=1024, noise=NoiseModel.preset(),
                          mitigation=MitigationConfig(mode="zne",
                                                      zne_scales=(1.0, 2.0),
                                                      zne_order=1)))


def median_final(records, field):
    return float(np.median([getattr(r, field) for r in records]))
