"""Pauli-string Hamiltonians, exact ground states, and measurement grouping.

Qubit ordering is big-endian throughout the package: qubit 1 is the most
significant bit of a basis-state index, and position 0 of a Pauli label
string ("XXIII") refers to qubit 1.  Pauli strings are stored as two bit
masks (x_mask, z_mask); a qubit with both bits set carries Y = i X Z.
"""

from dataclasses import dataclass
import json

import numpy as np
import scipy.sparse.linalg

DENSE_QUBIT_LIMIT = 14
_PHASES = (1.0, 1.0j, -1.0, -1.0j)  # i**popcount(x & z)


def bit_parity(values):
    """Parity of the set bits of each entry (vectorized XOR fold)."""
    v = np.asarray(values, dtype=np.int64)
    for shift in (32, 16, 8, 4, 2, 1):
        v = v ^ (v >> shift)
    return (v & 1).astype(np.int64)


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string, encoded as X/Z bit masks."""

    coefficient: float
    x_mask: int
    z_mask: int

    @property
    def support_mask(self) -> int:
        return self.x_mask | self.z_mask

    @classmethod
    def from_label(cls, coefficient, label: str) -> "PauliTerm":
        x = z = 0
        for ch in label:
            x <<= 1
            z <<= 1
            if ch == "X":
                x |= 1
            elif ch == "Z":
                z |= 1
            elif ch == "Y":
                x |= 1
                z |= 1
            elif ch != "I":
                raise ValueError(f"invalid Pauli character {ch!r}")
        return cls(float(coefficient), x, z)

    def label(self, qubits: int) -> str:
        chars = []
        for pos in range(qubits):
            bit = 1 << (qubits - 1 - pos)
            x, z = bool(self.x_mask & bit), bool(self.z_mask & bit)
            chars.append("Y" if x and z else "X" if x else "Z" if z else "I")
        return "".join(chars)

    def phase(self) -> complex:
        return _PHASES[(self.x_mask & self.z_mask).bit_count() % 4]


class Hamiltonian:
    """Sum of weighted Pauli strings on a fixed number of qubits.

    Terms with identical Pauli strings are merged on construction; terms
    whose merged coefficient is zero are dropped.  At least one term must
    survive.
    """

    def __init__(self, qubits: int, terms):
        if qubits < 1:
            raise ValueError("qubit count must be positive")
        merged: dict[tuple[int, int], float] = {}
        order: list[tuple[int, int]] = []
        for term in terms:
            if not np.isfinite(term.coefficient):
                raise ValueError("term coefficient must be finite")
            if term.support_mask >> qubits:
                raise ValueError("term acts outside the qubit register")
            key = (term.x_mask, term.z_mask)
            if key not in merged:
                merged[key] = 0.0
                order.append(key)
            merged[key] += term.coefficient
        kept = [PauliTerm(merged[k], *k) for k in order if merged[k] != 0.0]
        if not kept:
            raise ValueError("Hamiltonian has no nonzero terms")
        self.qubits = qubits
        self.terms = tuple(kept)

    def __repr__(self):
        body = " + ".join(f"{t.coefficient:g}*{t.label(self.qubits)}" for t in self.terms)
        return f"Hamiltonian({self.qubits} qubits: {body})"

    def to_dict(self) -> dict:
        return {
            "qubits": self.qubits,
            "terms": [
                {"coeff": t.coefficient, "paulis": t.label(self.qubits)}
                for t in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Hamiltonian":
        qubits = int(data["qubits"])
        terms = []
        for entry in data["terms"]:
            label = entry["paulis"]
            if len(label) != qubits:
                raise ValueError(f"Pauli label {label!r} does not match qubit count {qubits}")
            terms.append(PauliTerm.from_label(entry["coeff"], label))
        return cls(qubits, terms)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Hamiltonian":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class MeasurementGroup:
    """Qubit-wise commuting terms measured together in one shared basis."""

    basis: str
    member_terms: tuple


@dataclass(frozen=True)
class GroundTruth:
    """Exact ground-state energy and wave function."""

    energy: float
    state: np.ndarray


def build_heisenberg(qubits: int, j, h) -> Hamiltonian:
    """Open-boundary Heisenberg chain -sum_A J_A A_i A_{i+1} - sum_A h_A A_i.

    The overall minus sign is folded into the stored coefficients, so the
    critical Ising point (J_X, h_Z) = (-1, -1) yields +1 coefficients.
    """
    if qubits < 2:
        raise ValueError("Heisenberg chain needs at least 2 qubits")
    jx, jy, jz = j
    hx, hy, hz = h
    terms = []
    for coupling, ch in ((jx, "X"), (jy, "Y"), (jz, "Z")):
        if coupling == 0:
            continue
        for site in range(qubits - 1):
            label = ["I"] * qubits
            label[site] = ch
            label[site + 1] = ch
            terms.append(PauliTerm.from_label(-coupling, "".join(label)))
    for field, ch in ((hx, "X"), (hy, "Y"), (hz, "Z")):
        if field == 0:
            continue
        for site in range(qubits):
            label = ["I"] * qubits
            label[site] = ch
            terms.append(PauliTerm.from_label(-field, "".join(label)))
    return Hamiltonian(qubits, terms)


def critical_ising(qubits: int) -> Hamiltonian:
    """Transverse-field Ising chain at its critical point."""
    return build_heisenberg(qubits, (-1.0, 0.0, 0.0), (0.0, 0.0, -1.0))


def apply_term(term: PauliTerm, vec: np.ndarray) -> np.ndarray:
    """Apply one Pauli string to a state vector without densifying."""
    idx = np.arange(vec.size, dtype=np.int64)
    signs = 1.0 - 2.0 * bit_parity(idx & term.z_mask)
    out = np.empty_like(vec, dtype=complex)
    out[idx ^ term.x_mask] = (term.coefficient * term.phase()) * signs * vec
    return out


def apply_hamiltonian(hamiltonian: Hamiltonian, vec: np.ndarray) -> np.ndarray:
    out = np.zeros_like(vec, dtype=complex)
    for term in hamiltonian.terms:
        out += apply_term(term, vec)
    return out


def state_energy(hamiltonian: Hamiltonian, vec: np.ndarray) -> float:
    """Real expectation <v|H|v> computed term by term."""
    if vec.size != 2**hamiltonian.qubits:
        raise ValueError("state dimension does not match qubit count")
    return float(np.vdot(vec, apply_hamiltonian(hamiltonian, vec)).real)


def density_energy(hamiltonian: Hamiltonian, rho: np.ndarray) -> float:
    """Real expectation Tr(rho H) computed term by term."""
    dim = 2**hamiltonian.qubits
    if rho.shape != (dim, dim):
        raise ValueError("density dimension does not match qubit count")
    idx = np.arange(dim, dtype=np.int64)
    total = 0.0 + 0.0j
    for term in hamiltonian.terms:
        signs = 1.0 - 2.0 * bit_parity(idx & term.z_mask)
        total += term.coefficient * term.phase() * np.sum(rho[idx, idx ^ term.x_mask] * signs)
    return float(total.real)


def to_dense(hamiltonian: Hamiltonian) -> np.ndarray:
    """Dense 2^Q x 2^Q matrix of the Hamiltonian (big-endian ordering)."""
    if hamiltonian.qubits > DENSE_QUBIT_LIMIT:
        raise ValueError(f"dense matrix limited to {DENSE_QUBIT_LIMIT} qubits")
    dim = 2**hamiltonian.qubits
    idx = np.arange(dim, dtype=np.int64)
    mat = np.zeros((dim, dim), dtype=complex)
    for term in hamiltonian.terms:
        signs = 1.0 - 2.0 * bit_parity(idx & term.z_mask)
        mat[idx ^ term.x_mask, idx] += term.coefficient * term.phase() * signs
    return mat


def ground_state(hamiltonian: Hamiltonian, method: str = "auto",
                 maxiter: int = 10_000) -> GroundTruth:
    """Minimal eigenpair via dense eigensolve or Lanczos iteration.

    "auto" uses the dense path up to 10 qubits and Lanczos beyond; both
    paths are available explicitly for cross-checking.
    """
    if hamiltonian.qubits > DENSE_QUBIT_LIMIT:
        raise ValueError(f"exact diagonalization limited to {DENSE_QUBIT_LIMIT} qubits")
    if method == "auto":
        method = "dense" if hamiltonian.qubits <= 10 else "lanczos"
    if method == "dense":
        mat = to_dense(hamiltonian)
        vals, vecs = np.linalg.eigh(mat)
        energy, state = float(vals[0]), np.ascontiguousarray(vecs[:, 0])
    elif method == "lanczos":
        dim = 2**hamiltonian.qubits
        op = scipy.sparse.linalg.LinearOperator(
            (dim, dim), matvec=lambda v: apply_hamiltonian(hamiltonian, v), dtype=complex)
        vals, vecs = scipy.sparse.linalg.eigsh(op, k=1, which="SA", maxiter=maxiter,
                                               tol=1e-12)
        energy, state = float(vals[0]), np.ascontiguousarray(vecs[:, 0])
    else:
        raise ValueError(f"unknown method {method!r}")
    state = state / np.linalg.norm(state)
    residual = np.abs(apply_hamiltonian(hamiltonian, state) - energy * state).max()
    if residual > 1e-8:
        raise RuntimeError(f"eigensolver residual {residual:.3e} exceeds tolerance")
    return GroundTruth(energy, state)


def _compatible(basis: list, term: PauliTerm, qubits: int) -> bool:
    for pos in range(qubits):
        bit = 1 << (qubits - 1 - pos)
        x, z = bool(term.x_mask & bit), bool(term.z_mask & bit)
        if not (x or z):
            continue
        op = "Y" if x and z else "X" if x else "Z"
        if basis[pos] is not None and basis[pos] != op:
            return False
    return True


def group_terms(hamiltonian: Hamiltonian) -> list:
    """Greedy first-fit partition into qubit-wise commuting groups.

    Terms are scanned in stored order; identity positions act as wildcards
    and unconstrained qubits default to a Z basis.
    """
    qubits = hamiltonian.qubits
    bases: list[list] = []
    members: list[list[int]] = []
    for ti, term in enumerate(hamiltonian.terms):
        for basis, mem in zip(bases, members):
            if _compatible(basis, term, qubits):
                mem.append(ti)
                for pos in range(qubits):
                    bit = 1 << (qubits - 1 - pos)
                    x, z = bool(term.x_mask & bit), bool(term.z_mask & bit)
                    if x or z:
                        basis[pos] = "Y" if x and z else "X" if x else "Z"
                break
        else:
            basis = [None] * qubits
            for pos in range(qubits):
                bit = 1 << (qubits - 1 - pos)
                x, z = bool(term.x_mask & bit), bool(term.z_mask & bit)
                if x or z:
                    basis[pos] = "Y" if x and z else "X" if x else "Z"
            bases.append(basis)
            members.append([ti])
    return [
        MeasurementGroup("".join(b if b is not None else "Z" for b in basis),
                         tuple(mem))
        for basis, mem in zip(bases, members)
    ]
