"""Pauli algebra, exact diagonalization, and measurement grouping.

The dense-matrix tests compare against a slow Kronecker-product oracle
built directly from the label strings, so the bit-mask encoding and the
big-endian qubit convention are pinned independently of the fast path.
"""

import numpy as np
import pytest

from vqe_smo.hamiltonian import (DENSE_QUBIT_LIMIT, GroundTruth, Hamiltonian,
                                 MeasurementGroup, PauliTerm,
                                 apply_hamiltonian, apply_term, bit_parity,
                                 build_heisenberg, critical_ising,
                                 density_energy, ground_state, group_terms,
                                 state_energy, to_dense)

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

# Frozen reference energies for the critical Ising chain.  The 2-qubit
# value is analytic (-sqrt(5)); the larger ones come from an independent
# dense diagonalization of the Kronecker oracle below.
GROUND_Q2 = -np.sqrt(5.0)
GROUND_Q3 = -3.4939592074349326
GROUND_Q5 = -6.02667418333227


def _kron_oracle(ham: Hamiltonian) -> np.ndarray:
    total = np.zeros((2**ham.qubits,) * 2, dtype=complex)
    for term in ham.terms:
        mat = np.array([[1.0]], dtype=complex)
        for ch in term.label(ham.qubits):
            mat = np.kron(mat, _SINGLE[ch])
        total += term.coefficient * mat
    return total


def _random_hamiltonian(qubits, rng, n_terms=None):
    letters = np.array(list("IXYZ"))
    count = n_terms or int(rng.integers(2, 2 * qubits + 3))
    terms = []
    for _ in range(count):
        label = "".join(rng.choice(letters, size=qubits))
        if set(label) == {"I"}:
            label = "Y" + label[1:]
        terms.append(PauliTerm.from_label(float(rng.uniform(-2.0, 2.0)), label))
    return Hamiltonian(qubits, terms)


def test_label_mask_roundtrip():
    rng = np.random.default_rng(0)
    letters = np.array(list("IXYZ"))
    for qubits in (1, 2, 4, 7):
        for _ in range(20):
            label = "".join(rng.choice(letters, size=qubits))
            term = PauliTerm.from_label(1.0, label)
            assert term.label(qubits) == label


def test_mask_encoding_is_big_endian():
    term = PauliTerm.from_label(2.0, "XZY")
    # position 0 -> qubit 1 -> most significant bit
    assert term.x_mask == 0b101
    assert term.z_mask == 0b011
    assert term.support_mask == 0b111
    assert term.coefficient == 2.0


def test_invalid_pauli_character_rejected():
    with pytest.raises(ValueError):
        PauliTerm.from_label(1.0, "XQ")


@pytest.mark.parametrize("label,expected", [
    ("X", 1.0), ("Z", 1.0), ("Y", 1.0j), ("YY", -1.0),
    ("XYZ", 1.0j), ("YYYY", 1.0),
])
def test_phase_counts_y_factors(label, expected):
    assert PauliTerm.from_label(1.0, label).phase() == expected


def test_terms_merge_and_zeros_drop():
    ham = Hamiltonian(2, [PauliTerm.from_label(1.5, "XI"),
                          PauliTerm.from_label(-0.5, "XI"),
                          PauliTerm.from_label(0.25, "ZZ")])
    assert [t.label(2) for t in ham.terms] == ["XI", "ZZ"]
    assert ham.terms[0].coefficient == 1.0

    with pytest.raises(ValueError):
        Hamiltonian(2, [PauliTerm.from_label(1.0, "XI"),
                        PauliTerm.from_label(-1.0, "XI")])
    with pytest.raises(ValueError):
        Hamiltonian(2, [])
    with pytest.raises(ValueError):
        Hamiltonian(2, [PauliTerm.from_label(1.0, "XXX")])
    with pytest.raises(ValueError):
        Hamiltonian(2, [PauliTerm(float("nan"), 0, 1)])


def test_dense_single_qubit_matrices():
    for letter in "XYZ":
        ham = Hamiltonian(1, [PauliTerm.from_label(1.0, letter)])
        assert np.allclose(to_dense(ham), _SINGLE[letter])


def test_dense_field_sum_is_diagonal():
    ham = Hamiltonian(2, [PauliTerm.from_label(1.0, "ZI"),
                          PauliTerm.from_label(1.0, "IZ")])
    assert np.allclose(to_dense(ham), np.diag([2.0, 0.0, 0.0, -2.0]))


def test_dense_matches_kron_oracle():
    rng = np.random.default_rng(1)
    for _ in range(20):
        ham = _random_hamiltonian(int(rng.integers(1, 6)), rng)
        dense = to_dense(ham)
        assert np.abs(dense - _kron_oracle(ham)).max() < 1e-12
        assert np.abs(dense - dense.conj().T).max() < 1e-12


def test_apply_and_energies_match_dense():
    rng = np.random.default_rng(2)
    for _ in range(10):
        qubits = int(rng.integers(1, 5))
        ham = _random_hamiltonian(qubits, rng)
        dense = to_dense(ham)
        dim = 2**qubits

        vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        vec /= np.linalg.norm(vec)
        assert np.abs(apply_hamiltonian(ham, vec) - dense @ vec).max() < 1e-12
        assert state_energy(ham, vec) == pytest.approx(
            np.vdot(vec, dense @ vec).real, abs=1e-12)

        raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = raw @ raw.conj().T
        rho /= np.trace(rho).real
        assert density_energy(ham, rho) == pytest.approx(
            np.trace(rho @ dense).real, abs=1e-12)


def test_apply_single_term_uses_coefficient_and_phase():
    term = PauliTerm.from_label(0.5, "Y")
    out = apply_term(term, np.array([1.0, 0.0], dtype=complex))
    assert np.allclose(out, [0.0, 0.5j])


def test_state_energy_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        state_energy(critical_ising(2), np.zeros(8, dtype=complex))
    with pytest.raises(ValueError):
        density_energy(critical_ising(2), np.zeros((8, 8), dtype=complex))


@pytest.mark.parametrize("qubits,expected", [
    (2, GROUND_Q2), (3, GROUND_Q3), (5, GROUND_Q5),
])
def test_critical_ising_ground_energy(qubits, expected):
    truth = ground_state(critical_ising(qubits))
    assert truth.energy == pytest.approx(expected, abs=1e-9)
    ham = critical_ising(qubits)
    residual = apply_hamiltonian(ham, truth.state) - truth.energy * truth.state
    assert np.abs(residual).max() < 1e-8
    assert np.linalg.norm(truth.state) == pytest.approx(1.0, abs=1e-12)


def test_lanczos_agrees_with_dense():
    ham = critical_ising(5)
    dense = ground_state(ham, method="dense")
    lanczos = ground_state(ham, method="lanczos")
    assert lanczos.energy == pytest.approx(dense.energy, abs=1e-9)
    assert abs(np.vdot(dense.state, lanczos.state)) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        ground_state(ham, method="qr")


def test_exact_diagonalization_qubit_limit():
    big = Hamiltonian(DENSE_QUBIT_LIMIT + 1,
                      [PauliTerm.from_label(1.0, "Z" * (DENSE_QUBIT_LIMIT + 1))])
    with pytest.raises(ValueError):
        to_dense(big)
    with pytest.raises(ValueError):
        ground_state(big)


def test_heisenberg_signs_and_guards():
    ham = build_heisenberg(2, (-1.0, 0.0, 0.0), (0.0, 0.0, -1.0))
    by_label = {t.label(2): t.coefficient for t in ham.terms}
    assert by_label == {"XX": 1.0, "ZI": 1.0, "IZ": 1.0}
    with pytest.raises(ValueError):
        build_heisenberg(1, (-1.0, 0.0, 0.0), (0.0, 0.0, -1.0))


def test_ising_groups_into_two_bases():
    ham = critical_ising(5)
    groups = group_terms(ham)
    assert [g.basis for g in groups] == ["XXXXX", "ZZZZZ"]
    covered = sorted(i for g in groups for i in g.member_terms)
    assert covered == list(range(len(ham.terms)))


def test_groups_respect_qubitwise_commutation():
    rng = np.random.default_rng(3)
    for _ in range(20):
        ham = _random_hamiltonian(int(rng.integers(2, 6)), rng)
        groups = group_terms(ham)
        covered = sorted(i for g in groups for i in g.member_terms)
        assert covered == list(range(len(ham.terms)))
        for group in groups:
            assert len(group.basis) == ham.qubits
            for ti in group.member_terms:
                label = ham.terms[ti].label(ham.qubits)
                for pos, ch in enumerate(label):
                    if ch != "I":
                        assert group.basis[pos] == ch


def test_json_roundtrip():
    rng = np.random.default_rng(4)
    ham = _random_hamiltonian(3, rng)
    clone = Hamiltonian.from_json(ham.to_json())
    assert clone.qubits == ham.qubits
    assert [(t.coefficient, t.x_mask, t.z_mask) for t in clone.terms] == \
        [(t.coefficient, t.x_mask, t.z_mask) for t in ham.terms]
    with pytest.raises(ValueError):
        Hamiltonian.from_dict({"qubits": 3, "terms": [{"coeff": 1.0, "paulis": "XX"}]})


def test_bit_parity_folds_all_bits():
    assert list(bit_parity([0, 1, 2, 3, 7, 255, 256])) == [0, 1, 1, 0, 1, 0, 1]
    assert bit_parity(np.uint64(2**40 + 1)) == 0
