"""Energy estimation: sampling statistics, mitigation, shot accounting."""

import numpy as np
import pytest

from vqe_smo.errors import ConfigError, MitigationError
from vqe_smo.hamiltonian import (Hamiltonian, PauliTerm, critical_ising,
                                 density_energy, group_terms, state_energy)
from vqe_smo.measurement import (MitigationConfig, estimate_energy,
                                 measure_energy, measure_energy_trex,
                                 measure_energy_zne, zne_weights)
from vqe_smo.noise import NoiseModel
from vqe_smo.simulator import (build_ansatz, exact_energy, prepare_density,
                               prepare_state)

HAM3 = critical_ising(3)
ANSATZ3 = build_ansatz(3, 1)


def _theta(seed=20):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.0 * np.pi, ANSATZ3.param_count)


def test_exact_mode_matches_statevector():
    theta = _theta()
    rng = np.random.default_rng(0)
    est = measure_energy(ANSATZ3, theta, HAM3, 16, NoiseModel(), rng, exact=True)
    assert est.value == pytest.approx(
        state_energy(HAM3, prepare_state(ANSATZ3, theta)), abs=1e-12)
    assert est.std_error == 0.0
    assert est.shots_used == 0
    assert est.groups == len(group_terms(HAM3))


def test_exact_mode_uses_density_under_gate_noise():
    theta = _theta()
    noise = NoiseModel(global_depolarizing=0.2)
    rng = np.random.default_rng(0)
    est = measure_energy(ANSATZ3, theta, HAM3, 16, noise, rng, exact=True)
    rho = prepare_density(ANSATZ3, theta, noise)
    assert est.value == pytest.approx(density_energy(HAM3, rho), abs=1e-12)


def test_sampled_estimate_converges():
    theta = _theta()
    truth = exact_energy(ANSATZ3, theta, HAM3)
    rng = np.random.default_rng(21)
    est = measure_energy(ANSATZ3, theta, HAM3, 8192, NoiseModel(), rng)
    assert est.std_error > 0.0
    assert abs(est.value - truth) < 5.0 * est.std_error


def test_std_error_scales_with_shot_count():
    # quadrupling the shots should halve the reported error
    theta = _theta()
    rng = np.random.default_rng(22)
    small = [measure_energy(ANSATZ3, theta, HAM3, 256, NoiseModel(), rng).std_error
             for _ in range(30)]
    big = [measure_energy(ANSATZ3, theta, HAM3, 1024, NoiseModel(), rng).std_error
           for _ in range(30)]
    ratio = np.mean(big) / np.mean(small)
    assert 0.4 < ratio < 0.6


def test_shot_accounting():
    theta = _theta()
    groups = len(group_terms(HAM3))
    assert groups == 2
    noise = NoiseModel(readout_01=0.01, readout_10=0.01)
    rng = np.random.default_rng(23)

    plain = measure_energy(ANSATZ3, theta, HAM3, 64, noise, rng)
    assert plain.shots_used == 64 * groups

    twirled = measure_energy_trex(ANSATZ3, theta, HAM3, 64, noise, rng)
    assert twirled.shots_used == 64 * groups + 2 * 64

    config = MitigationConfig(mode="zne", zne_scales=(1.0, 2.0, 3.0), zne_order=1)
    folded = measure_energy_zne(ANSATZ3, theta, HAM3, 64,
                                NoiseModel(p1=0.001), config, rng)
    assert folded.shots_used == 3 * 64 * groups
    assert folded.groups == groups


def test_single_shot_reports_zero_std_error():
    rng = np.random.default_rng(24)
    est = measure_energy(ANSATZ3, _theta(), HAM3, 1, NoiseModel(), rng)
    assert est.std_error == 0.0
    with pytest.raises(ValueError):
        measure_energy(ANSATZ3, _theta(), HAM3, 0, NoiseModel(), rng)


def test_identity_terms_add_constant_without_variance():
    ham = Hamiltonian(2, [PauliTerm.from_label(2.5, "II"),
                          PauliTerm.from_label(1.0, "ZI")])
    ansatz = build_ansatz(2, 0)
    rng = np.random.default_rng(25)
    est = measure_energy(ansatz, np.zeros(4), ham, 128, NoiseModel(), rng)
    # |00> is a ZI eigenstate, so the sampled value is exact
    assert est.value == pytest.approx(3.5, abs=1e-12)
    assert est.std_error == 0.0


def test_linear_extrapolation_weights():
    assert np.allclose(zne_weights((1.0, 2.0), 1), [2.0, -1.0])
    w = zne_weights((1.0, 2.0, 3.0), 1)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert w @ np.array([1.0, 2.0, 3.0]) == pytest.approx(0.0, abs=1e-12)
    w2 = zne_weights((1.0, 2.0, 3.0), 2)
    assert np.allclose(w2, [3.0, -3.0, 1.0])


def test_zne_recovers_linear_response_exactly():
    theta = _theta()
    truth = exact_energy(ANSATZ3, theta, HAM3)
    noise = NoiseModel(global_depolarizing=0.05)
    rng = np.random.default_rng(26)
    for scales, order in (((1.0, 2.0), 1), ((1.0, 1.5, 2.0), 2)):
        config = MitigationConfig(mode="zne", zne_scales=scales, zne_order=order)
        est = measure_energy_zne(ANSATZ3, theta, HAM3, 1, noise, config, rng,
                                 exact=True)
        assert est.value == pytest.approx(truth, abs=1e-10)


def test_zne_guards():
    rng = np.random.default_rng(27)
    config = MitigationConfig(mode="zne", zne_scales=(1.0, 2.0), zne_order=1)
    with pytest.raises(ValueError):
        measure_energy_zne(ANSATZ3, _theta(), HAM3, 16,
                           NoiseModel(p1=0.001).scaled(2.0), config, rng)
    with pytest.raises(ValueError):
        measure_energy_zne(ANSATZ3, _theta(), HAM3, 16, NoiseModel(),
                           MitigationConfig(mode="trex"), rng)


def test_readout_twirling_removes_bias():
    # |000> pins the field terms at +1, so readout attenuation biases the
    # plain estimate by a large, fixed amount
    theta = np.zeros(ANSATZ3.param_count)
    truth = exact_energy(ANSATZ3, theta, HAM3)
    noise = NoiseModel(readout_01=0.08, readout_10=0.08)
    rng = np.random.default_rng(28)

    twirled = np.array([measure_energy_trex(ANSATZ3, theta, HAM3, 512, noise,
                                            rng).value for _ in range(40)])
    plain = np.array([measure_energy(ANSATZ3, theta, HAM3, 512, noise,
                                     rng).value for _ in range(40)])
    se_twirled = twirled.std(ddof=1) / np.sqrt(40)
    se_plain = plain.std(ddof=1) / np.sqrt(40)
    assert abs(twirled.mean() - truth) < 4.0 * se_twirled
    assert abs(plain.mean() - truth) > 4.0 * se_plain


def test_trex_fixed_randomization_count():
    theta = _theta()
    noise = NoiseModel(readout_01=0.02, readout_10=0.02)
    rng = np.random.default_rng(29)
    est = measure_energy_trex(ANSATZ3, theta, HAM3, 64, noise, rng,
                              randomizations=4)
    assert np.isfinite(est.value)
    assert est.shots_used == 64 * 2 + 2 * 64


def test_trex_refuses_tiny_attenuation():
    noise = NoiseModel(readout_01=0.49, readout_10=0.49)
    rng = np.random.default_rng(30)
    with pytest.raises(MitigationError):
        measure_energy_trex(ANSATZ3, _theta(), HAM3, 2048, noise, rng)


def test_mitigation_config_validation():
    with pytest.raises(ConfigError):
        MitigationConfig(mode="fold")
    with pytest.raises(ConfigError):
        MitigationConfig(mode="zne", zne_scales=(2.0, 3.0))
    with pytest.raises(ConfigError):
        MitigationConfig(mode="zne", zne_scales=(1.0, 1.0))
    with pytest.raises(ConfigError):
        MitigationConfig(mode="zne", zne_scales=(1.0, 2.0), zne_order=2)
    with pytest.raises(ConfigError):
        MitigationConfig(trex_randomizations=0)
    with pytest.raises(ConfigError):
        MitigationConfig.from_dict({"mode": "none", "shots": 4})
    clone = MitigationConfig.from_dict(
        MitigationConfig(mode="trex", trex_randomizations=8).to_dict())
    assert clone.mode == "trex"
    assert clone.trex_randomizations == 8


def test_dispatcher_routes_by_mode():
    theta = _theta()
    noise = NoiseModel(readout_01=0.02, readout_10=0.02)

    direct = measure_energy(ANSATZ3, theta, HAM3, 64, noise,
                            np.random.default_rng(31))
    routed = estimate_energy(ANSATZ3, theta, HAM3, 64, noise,
                             MitigationConfig(), np.random.default_rng(31))
    assert routed == direct

    trex = estimate_energy(ANSATZ3, theta, HAM3, 64, noise,
                           MitigationConfig(mode="trex"),
                           np.random.default_rng(31))
    assert trex.shots_used == 64 * 2 + 2 * 64

    zne = estimate_energy(ANSATZ3, theta, HAM3, 64, NoiseModel(p1=0.001),
                          MitigationConfig(mode="zne", zne_scales=(1.0, 2.0),
                                           zne_order=1),
                          np.random.default_rng(31))
    assert zne.shots_used == 2 * 64 * 2


def test_precomputed_groups_match_implicit_grouping():
    theta = _theta()
    groups = group_terms(HAM3)
    a = measure_energy(ANSATZ3, theta, HAM3, 128, NoiseModel(),
                       np.random.default_rng(32))
    b = measure_energy(ANSATZ3, theta, HAM3, 128, NoiseModel(),
                       np.random.default_rng(32), groups=groups)
    assert a == b
