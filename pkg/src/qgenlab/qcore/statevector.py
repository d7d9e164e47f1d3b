"""Dense statevector simulation (little-endian: qubit 0 is the least significant bit)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import H2, S2, Gate, gate_matrix

NORM_TOL = 1e-10
UNDERFLOW = 1e-14


def apply_matrix(psi: np.ndarray, mat: np.ndarray, targets, n: int) -> np.ndarray:
    """Apply a k-qubit matrix to amplitudes of shape (..., 2**n)."""
    k = len(targets)
    lead = psi.shape[:-1]
    t = psi.reshape((-1,) + (2,) * n)
    axes = [1 + n - 1 - q for q in reversed(targets)]  # local big-endian order
    m = np.asarray(mat).reshape((2,) * (2 * k))
    out = np.tensordot(m, t, axes=(list(range(k, 2 * k)), axes))
    # out axes: k new axes then batch then untouched axes in order
    out = np.moveaxis(out, list(range(k)), axes) if k else out
    # tensordot puts the batch axis at position k; moveaxis above keeps relative order
    return out.reshape(lead + (2 ** n,))


def apply_gate(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    for q in gate.targets:
        if not 0 <= q < n:
            raise IndexError(f"target {q} out of range for {n} qubits")
    return apply_matrix(psi, gate_matrix(gate), gate.targets, n)


def apply_diagonal(psi: np.ndarray, diag: np.ndarray) -> np.ndarray:
    return psi * diag


def bit_mask(n: int, q: int) -> np.ndarray:
    return (np.arange(2 ** n) >> q) & 1


def zero_state(n: int) -> np.ndarray:
    v = np.zeros(2 ** n, dtype=complex)
    v[0] = 1.0
    return v


def product_state(vectors) -> np.ndarray:
    """Kronecker product of per-qubit vectors, vectors[q] for qubit q."""
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(np.asarray(v, dtype=complex), out)
    return out


@dataclass
class Statevector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** self.num_qubits,):
            raise ValueError("amplitude vector must have length 2**num_qubits")

    @classmethod
    def zero(cls, n: int) -> "Statevector":
        return cls(n, zero_state(n))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "Statevector":
        return Statevector(self.num_qubits, self.amplitudes.copy())


def apply_circuit(state: Statevector, circuit) -> Statevector:
    if circuit.num_qubits != state.num_qubits:
        raise ValueError("circuit and state qubit counts differ")
    psi = state.amplitudes
    for g in circuit.gates():
        psi = apply_gate(psi, g, state.num_qubits)
    out = Statevector(state.num_qubits, psi)
    if abs(out.norm - 1.0) > NORM_TOL:
        raise FloatingPointError("norm drifted during circuit application")
    return out


_TO_Z = {"Z": np.eye(2, dtype=complex), "X": H2, "Y": H2 @ S2.conj()}


def basis_rotation(basis: str) -> np.ndarray:
    """Unitary mapping the eigenbasis of ``basis`` onto the computational basis."""
    return _TO_Z[basis]


def measure_qubit(state: Statevector, qubit: int, basis: str, rng) -> tuple[int, Statevector]:
    n = state.num_qubits
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range")
    u = basis_rotation(basis)
    psi = apply_matrix(state.amplitudes, u, (qubit,), n)
    mask = bit_mask(n, qubit).astype(bool)
    p1 = float(np.sum(np.abs(psi[mask]) ** 2))
    bit = int(rng.random() < p1)
    p = p1 if bit else 1.0 - p1
    if p < UNDERFLOW:
        raise FloatingPointError("selected measurement branch has vanishing probability")
    psi = np.where(mask == bool(bit), psi, 0.0) / np.sqrt(p)
    psi = apply_matrix(psi, u.conj().T, (qubit,), n)
    return bit, Statevector(n, psi)


def reset_qubit(state: Statevector, qubit: int, rng) -> Statevector:
    bit, post = measure_qubit(state, qubit, "Z", rng)
    if bit:
        post = Statevector(post.num_qubits, apply_gate(post.amplitudes, Gate("X", (qubit,)), post.num_qubits))
    return post


def sample_bitstrings(probs: np.ndarray, shots: int, rng) -> np.ndarray:
    """Sample basis indices from a probability vector."""
    p = np.clip(np.asarray(probs, dtype=float), 0, None)
    p = p / p.sum()
    return rng.choice(len(p), size=shots, p=p)


def sample_rows(probs: np.ndarray, rng) -> np.ndarray:
    """One categorical draw per row of a (B, K) probability array."""
    c = np.cumsum(probs, axis=1)
    c /= c[:, -1:]
    u = rng.random((probs.shape[0], 1))
    return np.minimum((c < u).sum(axis=1), probs.shape[1] - 1)
