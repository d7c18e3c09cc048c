"""Hardware-efficient ansatz circuits and state/density simulation.

States are complex vectors of length 2^Q in big-endian order (qubit 1 is
the most significant bit).  The density path applies the same circuit to
a 2^Q x 2^Q matrix and interleaves depolarizing channels after every
gate, which is only needed when gate noise is active.
"""

from dataclasses import dataclass

import numpy as np

from .hamiltonian import Hamiltonian, GroundTruth, bit_parity
from .noise import NoiseModel

DENSITY_QUBIT_LIMIT = 10

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
# S-dagger followed by Hadamard, as one matrix
_HSDG = np.array([[1.0, -1.0j], [1.0, 1.0j]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class RotationGate:
    axis: str  # "y" or "z"
    qubit: int  # 0-based
    param_index: int


@dataclass(frozen=True)
class EntanglerGate:
    control: int
    target: int


@dataclass(frozen=True)
class Ansatz:
    """Layered RY/RZ rotations with all-pairs CX entanglers."""

    qubits: int
    layers: int
    param_count: int
    gates: tuple


def build_ansatz(qubits: int, layers: int) -> Ansatz:
    """Rotation blocks 0..layers, CX entanglers after all but the last.

    Parameter indices are qubit-major within a block: block b, qubit q
    (0-based) uses index 2*b*qubits + 2*q for RY and +1 for RZ.  Every
    block applies all RY gates, then all RZ gates; entanglers cover all
    ordered pairs control < target.
    """
    if qubits < 1:
        raise ValueError("ansatz needs at least 1 qubit")
    if layers < 0:
        raise ValueError("layer count must be nonnegative")
    gates = []
    for block in range(layers + 1):
        base = 2 * block * qubits
        for q in range(qubits):
            gates.append(RotationGate("y", q, base + 2 * q))
        for q in range(qubits):
            gates.append(RotationGate("z", q, base + 2 * q + 1))
        if block < layers:
            for c in range(qubits):
                for t in range(c + 1, qubits):
                    gates.append(EntanglerGate(c, t))
    return Ansatz(qubits, layers, 2 * (layers + 1) * qubits, tuple(gates))


def _rotation_matrix(axis: str, angle: float) -> np.ndarray:
    half = 0.5 * angle
    if axis == "y":
        c, s = np.cos(half), np.sin(half)
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array([[np.exp(-1.0j * half), 0.0], [0.0, np.exp(1.0j * half)]])


def _apply_1q(tensor: np.ndarray, mat: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(tensor, axis, 0)
    shape = moved.shape
    out = (mat @ moved.reshape(2, -1)).reshape(shape)
    return np.moveaxis(out, 0, axis)


def _apply_cx(tensor: np.ndarray, control: int, target: int) -> np.ndarray:
    ndim = tensor.ndim
    lo = [slice(None)] * ndim
    hi = [slice(None)] * ndim
    lo[control] = 1
    hi[control] = 1
    lo[target] = 0
    hi[target] = 1
    a = tensor[tuple(lo)].copy()
    tensor[tuple(lo)] = tensor[tuple(hi)]
    tensor[tuple(hi)] = a
    return tensor


def prepare_state(ansatz: Ansatz, theta) -> np.ndarray:
    """Noiseless state vector for the given parameter values."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (ansatz.param_count,):
        raise ValueError(f"expected {ansatz.param_count} parameters, got {theta.shape}")
    q = ansatz.qubits
    tensor = np.zeros((2,) * q, dtype=complex)
    tensor[(0,) * q] = 1.0
    for gate in ansatz.gates:
        if isinstance(gate, RotationGate):
            mat = _rotation_matrix(gate.axis, theta[gate.param_index])
            tensor = _apply_1q(tensor, mat, gate.qubit)
        else:
            tensor = _apply_cx(tensor, gate.control, gate.target)
    return tensor.reshape(-1)


def _mix_single(rho: np.ndarray, q: int, qubits: int) -> np.ndarray:
    """Replace qubit q of a density tensor with the maximally mixed state."""
    traced = np.trace(rho, axis1=q, axis2=qubits + q)
    out = np.zeros_like(rho)
    for v in (0, 1):
        sl = [slice(None)] * (2 * qubits)
        sl[q] = v
        sl[qubits + q] = v
        out[tuple(sl)] = 0.5 * traced
    return out


def _mix_pair(rho: np.ndarray, qa: int, qb: int, qubits: int) -> np.ndarray:
    """Replace qubits qa < qb with the maximally mixed two-qubit state."""
    traced = np.trace(rho, axis1=qb, axis2=qubits + qb)
    traced = np.trace(traced, axis1=qa, axis2=qubits + qa - 1)
    out = np.zeros_like(rho)
    for va in (0, 1):
        for vb in (0, 1):
            sl = [slice(None)] * (2 * qubits)
            sl[qa] = va
            sl[qb] = vb
            sl[qubits + qa] = va
            sl[qubits + qb] = vb
            out[tuple(sl)] = 0.25 * traced
    return out


def prepare_density(ansatz: Ansatz, theta, noise: NoiseModel) -> np.ndarray:
    """Density matrix after the circuit with depolarizing noise channels.

    Uniform single-qubit depolarizing with probability p contracts toward
    the mixed state with weight 4p/3 (Pauli averaging), and the two-qubit
    channel with weight 16p/15.  A nonzero global rate mixes the final
    state toward identity.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (ansatz.param_count,):
        raise ValueError(f"expected {ansatz.param_count} parameters, got {theta.shape}")
    q = ansatz.qubits
    if q > DENSITY_QUBIT_LIMIT:
        raise ValueError(f"density simulation limited to {DENSITY_QUBIT_LIMIT} qubits")
    rho = np.zeros((2,) * (2 * q), dtype=complex)
    rho[(0,) * (2 * q)] = 1.0
    w1 = 4.0 * noise.p1 / 3.0
    w2 = 16.0 * noise.p2 / 15.0
    for gate in ansatz.gates:
        if isinstance(gate, RotationGate):
            mat = _rotation_matrix(gate.axis, theta[gate.param_index])
            rho = _apply_1q(rho, mat, gate.qubit)
            rho = _apply_1q(rho, mat.conj(), q + gate.qubit)
            if w1 > 0.0:
                rho = (1.0 - w1) * rho + w1 * _mix_single(rho, gate.qubit, q)
        else:
            rho = _apply_cx(rho, gate.control, gate.target)
            rho = _apply_cx(rho, q + gate.control, q + gate.target)
            if w2 > 0.0:
                rho = (1.0 - w2) * rho + w2 * _mix_pair(rho, gate.control, gate.target, q)
    g = noise.global_depolarizing
    if g > 0.0:
        dim = 2**q
        rho = rho.reshape(dim, dim)
        rho = (1.0 - g) * rho + g * np.eye(dim) / dim
        return rho
    return rho.reshape(2**q, 2**q)


def exact_energy(ansatz: Ansatz, theta, hamiltonian: Hamiltonian) -> float:
    """Noiseless expectation value at the given parameters."""
    from .hamiltonian import state_energy

    if ansatz.qubits != hamiltonian.qubits:
        raise ValueError("ansatz and Hamiltonian qubit counts differ")
    return state_energy(hamiltonian, prepare_state(ansatz, theta))


def fidelity(state, ground: GroundTruth) -> float:
    """Overlap probability with the exact ground state, clipped to [0, 1].

    Accepts either a state vector or a density matrix.
    """
    state = np.asarray(state)
    if state.ndim == 1:
        val = abs(np.vdot(ground.state, state)) ** 2
    elif state.ndim == 2:
        val = float(np.real(np.vdot(ground.state, state @ ground.state)))
    else:
        raise ValueError("expected a vector or a square matrix")
    return float(min(max(val, 0.0), 1.0))


def check_state(vec: np.ndarray, atol: float = 1e-9) -> None:
    """Raise if vec is not a normalized state vector."""
    if vec.ndim != 1 or vec.size & (vec.size - 1):
        raise ValueError("state vector length must be a power of two")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"state norm {norm} is not 1")


def check_density(rho: np.ndarray, atol: float = 1e-9) -> None:
    """Raise if rho is not Hermitian, unit-trace, and PSD within tolerance."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.abs(rho - rho.conj().T).max() > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > atol:
        raise ValueError("density matrix trace is not 1")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -atol:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min()}")


def _basis_change(state, basis: str):
    """Rotate a copy of the state/density into the measurement basis."""
    qubits = len(basis)
    if np.asarray(state).ndim == 1:
        tensor = np.array(state, dtype=complex).reshape((2,) * qubits)
        for pos, ch in enumerate(basis):
            if ch == "X":
                tensor = _apply_1q(tensor, _H, pos)
            elif ch == "Y":
                tensor = _apply_1q(tensor, _HSDG, pos)
            elif ch != "Z":
                raise ValueError(f"invalid basis character {ch!r}")
        return tensor.reshape(-1)
    tensor = np.array(state, dtype=complex).reshape((2,) * (2 * qubits))
    for pos, ch in enumerate(basis):
        if ch == "X":
            tensor = _apply_1q(tensor, _H, pos)
            tensor = _apply_1q(tensor, _H.conj(), qubits + pos)
        elif ch == "Y":
            tensor = _apply_1q(tensor, _HSDG, pos)
            tensor = _apply_1q(tensor, _HSDG.conj(), qubits + pos)
        elif ch != "Z":
            raise ValueError(f"invalid basis character {ch!r}")
    return tensor.reshape(2**qubits, 2**qubits)


def group_distribution(state, group) -> np.ndarray:
    """Outcome probabilities after rotating into the group's shared basis.

    group may be a MeasurementGroup or a bare basis string.
    """
    rotated = _basis_change(state, getattr(group, "basis", group))
    if rotated.ndim == 1:
        probs = np.abs(rotated) ** 2
    else:
        probs = np.real(np.diagonal(rotated)).copy()
    if probs.min() < -1e-9:
        raise ValueError(f"negative outcome probability {probs.min()}")
    np.clip(probs, 0.0, None, out=probs)
    total = probs.sum()
    if not np.isclose(total, 1.0, atol=1e-6):
        raise ValueError(f"outcome probabilities sum to {total}")
    return probs / total


def sample_outcomes(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw measurement outcomes (basis-state indices) from a distribution."""
    if shots < 1:
        raise ValueError("shot count must be positive")
    return rng.choice(probs.size, size=shots, p=probs).astype(np.int64)


def apply_readout_noise(outcomes: np.ndarray, qubits: int, read01: float,
                        read10: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each outcome bit independently with asymmetric error rates."""
    if read01 == 0.0 and read10 == 0.0:
        return outcomes
    out = outcomes.copy()
    for pos in range(qubits):
        shift = qubits - 1 - pos
        bits = (out >> shift) & 1
        draws = rng.random(out.size)
        flip = np.where(bits == 1, draws < read10, draws < read01)
        out ^= flip.astype(np.int64) << shift
    return out


def sample_counts(state, group, shots: int, noise: NoiseModel,
                  rng: np.random.Generator) -> dict:
    """Histogram of noisy readout bitstrings for one measurement group."""
    basis = getattr(group, "basis", group)
    qubits = len(basis)
    probs = group_distribution(state, basis)
    outcomes = sample_outcomes(probs, shots, rng)
    outcomes = apply_readout_noise(outcomes, qubits, noise.readout_01,
                                   noise.readout_10, rng)
    values, counts = np.unique(outcomes, return_counts=True)
    return {format(int(v), f"0{qubits}b"): int(c) for v, c in zip(values, counts)}


def parity_signs(outcomes: np.ndarray, support_mask: int) -> np.ndarray:
    """Eigenvalue (+1/-1) of the measured Pauli string for each outcome."""
    return 1.0 - 2.0 * bit_parity(outcomes & np.int64(support_mask))
