"""Sewing per-qubit pieces into a 2n-qubit unitary.

Qubits 0..n-1 form the first register and n..2n-1 the second.  The
inversion form uses (system, ancilla) order and the Heisenberg form uses
(ancilla, system) order; ``SewedCircuit.convention`` records which.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..qcore.gates import PAULI, SWAP4
from ..qcore.linalg import nearest_unitary, operator_norm, partial_trace
from ..qcore.statevector import apply_matrix

DENSE_SEW_LIMIT = 6
_PS = ("X", "Y", "Z")


@dataclass
class SewedCircuit:
    """Factors in time order; each factor is (matrix, qubits) with little-endian local order."""

    n: int
    kind: str  # "LocalInversion" or "DirectHeisenberg"
    factors: list
    eps: list = field(default_factory=list)

    @property
    def convention(self) -> str:
        return "system,ancilla" if self.kind == "LocalInversion" else "ancilla,system"

    @property
    def num_qubits(self) -> int:
        return 2 * self.n

    @property
    def gate_count(self) -> int:
        return len(self.factors)

    def unitary(self) -> np.ndarray:
        if self.n > DENSE_SEW_LIMIT:
            raise ValueError("dense sewed unitary limited to n <= 6")
        m = 2 * self.n
        out = np.eye(2 ** m, dtype=complex)  # row k holds the image of basis state k
        for mat, qs in self.factors:
            out = apply_matrix(out, mat, qs, m)
        return out.T

    def apply_state(self, psi: np.ndarray) -> np.ndarray:
        """Run the circuit on a 2n-qubit statevector."""
        m = 2 * self.n
        for mat, qs in self.factors:
            psi = apply_matrix(psi, mat, qs, m)
        return psi

    def channel(self, rho: np.ndarray) -> np.ndarray:
        """Learned n-qubit channel: ancilla in |0^n>, trace out the ancilla register."""
        n = self.n
        anc = np.zeros((2 ** n, 2 ** n), dtype=complex)
        anc[0, 0] = 1.0
        if self.kind == "LocalInversion":
            full, keep = np.kron(anc, rho), range(n)
        else:
            full, keep = np.kron(rho, anc), range(n, 2 * n)
        u = self.unitary()
        out = u @ full @ u.conj().T
        return partial_trace(out, range(2 * n), keep)

    def reference(self, u: np.ndarray) -> np.ndarray:
        """The ideal sewed unitary: U x U^dag (inversion form) or U^dag x U (Heisenberg form)."""
        if self.kind == "LocalInversion":
            return np.kron(u.conj().T, u)
        return np.kron(u, u.conj().T)

    def error(self, u: np.ndarray) -> float:
        return operator_norm(self.unitary() - self.reference(u))

    def to_dict(self) -> dict:
        return {
            "n": self.n, "construction": self.kind, "convention": self.convention, "eps": list(self.eps),
            "factors": [{"qubits": list(qs), "re": m.real.tolist(), "im": m.imag.tolist()}
                        for m, qs in self.factors],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SewedCircuit":
        facs = [(np.asarray(f["re"]) + 1j * np.asarray(f["im"]), tuple(f["qubits"])) for f in d["factors"]]
        return cls(int(d["n"]), d["construction"], facs, list(d.get("eps", [])))


def _global_swap(n: int) -> list:
    return [(SWAP4, (q, n + q)) for q in range(n)]


def sew_local_inversions(inversions: list, n: int) -> SewedCircuit:
    """S prod_i (V_i x I) S_i (V_i^dag x I), with V_1's factor leftmost."""
    by_qubit = {inv.qubit: inv for inv in inversions}
    missing = [i for i in range(n) if i not in by_qubit]
    if missing:
        raise ValueError(f"missing inversions for qubits {missing}")
    factors = []
    for i in reversed(range(n)):
        inv = by_qubit[i]
        factors.append((inv.unitary.conj().T, tuple(inv.window)))
        factors.append((SWAP4, (i, n + i)))
        factors.append((inv.unitary, tuple(inv.window)))
    factors += _global_swap(n)
    return SewedCircuit(n, "LocalInversion", factors, [by_qubit[i].eps for i in range(n)])


def heisenberg_factor(observables: dict, i: int, n: int) -> tuple[np.ndarray, tuple]:
    """Proj_U(1/2 I x I + 1/2 sum_P P_i x O_hat[i, P]) on (ancilla i, system window)."""
    qs = {i}
    for P in _PS:
        qs.update(observables[(i, P)].support)
    window = tuple(sorted(qs))
    d = 2 ** len(window)
    m = 0.5 * np.eye(2 * d, dtype=complex)
    for P in _PS:
        m += 0.5 * np.kron(observables[(i, P)].matrix(window), PAULI[P])
    return nearest_unitary(m), (i,) + tuple(n + q for q in window)


def direct_heisenberg_sew(observables: dict, n: int, eps=None) -> SewedCircuit:
    """S prod_i Proj_U(S_i) from observables keyed by (i, P)."""
    for i in range(n):
        for P in _PS:
            if (i, P) not in observables:
                raise ValueError(f"missing observable for qubit {i}, basis {P}")
    factors = [heisenberg_factor(observables, i, n) for i in reversed(range(n))]
    factors += _global_swap(n)
    return SewedCircuit(n, "DirectHeisenberg", factors, list(eps) if eps is not None else [])


def true_inversion_error(v: np.ndarray, window, u: np.ndarray, i: int) -> float:
    """sum_P ||V^dag U^dag P_i U V - P_i||_inf against the full unitary U."""
    n = int(round(np.log2(u.shape[0])))
    vf = np.eye(2 ** n, dtype=complex)
    vf = apply_matrix(vf, v, tuple(window), n).T
    w = u @ vf
    total = 0.0
    for P in _PS:
        p = np.eye(2 ** n, dtype=complex)
        p = apply_matrix(p, PAULI[P], (i,), n).T
        total += operator_norm(w.conj().T @ p @ w - p)
    return float(total)


def true_heisenberg_error(observables: dict, u: np.ndarray, i: int) -> float:
    """sum_P ||O_hat[i, P] - U^dag P_i U||_inf."""
    n = int(round(np.log2(u.shape[0])))
    total = 0.0
    for P in _PS:
        p = apply_matrix(np.eye(2 ** n, dtype=complex), PAULI[P], (i,), n).T
        total += operator_norm(observables[(i, P)].matrix() - u.conj().T @ p @ u)
    return float(total)
