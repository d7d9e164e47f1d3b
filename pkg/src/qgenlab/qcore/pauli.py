"""Pauli strings, Pauli-sum observables, decomposition and Heisenberg evolution."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .gates import PAULI
from .circuit import Circuit, window_unitary

LETTERS = "IXYZ"
_MUL = {  # (a, b) -> (phase, c) with a*b = phase*c
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}
DENSE_LIMIT = 12


@dataclass(frozen=True)
class PauliString:
    """letters[q] is the Pauli on qubit q."""

    letters: str
    phase: complex = 1

    def __post_init__(self):
        if any(c not in LETTERS for c in self.letters):
            raise ValueError(f"bad Pauli letters {self.letters!r}")
        if self.phase not in (1, -1, 1j, -1j):
            raise ValueError("phase must be one of +-1, +-i")

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        s = ["I"] * n
        s[qubit] = letter
        return cls("".join(s))

    @property
    def num_qubits(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.letters)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, c in enumerate(self.letters) if c != "I")

    def __mul__(self, other: "PauliString") -> "PauliString":
        if len(self.letters) != len(other.letters):
            raise ValueError("length mismatch")
        phase = complex(self.phase) * complex(other.phase)
        out = []
        for a, b in zip(self.letters, other.letters):
            ph, c = _MUL[(a, b)]
            phase *= ph
            out.append(c)
        phase = complex(round(phase.real), round(phase.imag))
        return PauliString("".join(out), phase if phase.imag else int(phase.real))

    def matrix(self) -> np.ndarray:
        return complex(self.phase) * pauli_matrix(self.letters)


def pauli_matrix(letters: str) -> np.ndarray:
    m = np.ones((1, 1), dtype=complex)
    for c in letters:  # qubit 0 ends up least significant
        m = np.kron(PAULI[c], m)
    return m


@dataclass
class PauliObservable:
    num_qubits: int
    terms: dict  # letters -> coefficient

    @property
    def support(self) -> tuple[int, ...]:
        qs = set()
        for s, c in self.terms.items():
            if c != 0:
                qs.update(q for q, ch in enumerate(s) if ch != "I")
        return tuple(sorted(qs))

    def coefficient(self, letters: str) -> float:
        return self.terms.get(letters, 0.0)

    def matrix(self, window=None) -> np.ndarray:
        """Dense matrix on ``window`` (default all qubits); terms must live inside it."""
        window = list(range(self.num_qubits)) if window is None else list(window)
        out = np.zeros((2 ** len(window),) * 2, dtype=complex)
        wset = set(window)
        for s, c in self.terms.items():
            if c == 0:
                continue
            if any(ch != "I" and q not in wset for q, ch in enumerate(s)):
                raise ValueError("term outside the requested window")
            out += c * pauli_matrix("".join(s[q] for q in window))
        return out

    def norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.terms.values()))


def pauli_decompose(mat: np.ndarray, tol: float = 0.0) -> PauliObservable:
    """Coefficients Tr(Q^dag M)/2^k for every k-qubit Pauli string Q."""
    mat = np.asarray(mat, dtype=complex)
    d = mat.shape[0]
    k = int(round(np.log2(d))) if d > 0 else -1
    if d < 1 or 2 ** k != d or mat.shape != (d, d):
        raise ValueError("matrix dimension must be 2^k x 2^k")
    if k > 8:
        raise ValueError("pauli_decompose limited to 8 qubits")
    paulis = np.stack([PAULI[c] for c in LETTERS])  # (4, 2, 2)
    # rows and columns in big-endian tensor form: axis j <-> qubit k-1-j
    t = mat.reshape((2,) * (2 * k))
    # contract qubit by qubit: c[..P..] = sum_{i,j} M[i,j] conj(P)[i,j] ... with trace(P^dag M)
    for j in range(k):
        # current layout: [done Pauli axes (j)] + row axes (k-j) + col axes (k-j)
        r = k - j
        t = np.tensordot(t, paulis.conj(), axes=([j, j + r], [1, 2]))  # sum_i,j conj(P_ij) M_ij
        t = np.moveaxis(t, -1, j)
    coeffs = t.reshape(-1) / d
    hermitian = np.allclose(mat, mat.conj().T, atol=1e-12)
    terms = {}
    for idx, label in enumerate(itertools.product(LETTERS, repeat=k)):
        c = coeffs[idx]
        if abs(c) > tol:
            # label[0] is the most significant qubit (k-1)
            letters = "".join(reversed(label))
            terms[letters] = float(c.real) if hermitian else complex(c)
    return PauliObservable(k, terms)


def backward_lightcone(arch: Circuit, qubits) -> frozenset:
    s = set(qubits)
    for m in reversed(arch.moments):
        for g in m:
            if s.intersection(g.targets):
                s.update(g.targets)
    return frozenset(s)


def lightcone_gates(arch: Circuit, qubits):
    """Gates of ``arch`` inside the backward lightcone of ``qubits`` (in time order)."""
    s = set(qubits)
    kept = []
    for m in reversed(arch.moments):
        for g in m:
            if s.intersection(g.targets):
                s.update(g.targets)
                kept.append(g)
    return list(reversed(kept)), sorted(s)


def heisenberg_evolve(circuit: Circuit, p: PauliString, dense_limit: int = DENSE_LIMIT) -> PauliObservable:
    """U^dag P U restricted to the backward lightcone of P, as a Pauli sum."""
    if p.weight < 1:
        raise ValueError("Pauli string must be non-identity")
    gates, window = lightcone_gates(circuit, p.support)
    if len(window) > dense_limit:
        raise ValueError(f"lightcone window of {len(window)} qubits exceeds dense limit {dense_limit}")
    if len(window) > 8:
        raise ValueError("Pauli decomposition limited to 8-qubit windows")
    u = window_unitary(gates, window)
    local = complex(p.phase) * pauli_matrix("".join(p.letters[q] for q in window))
    obs = pauli_decompose(u.conj().T @ local @ u, tol=1e-14)
    n = circuit.num_qubits
    terms = {}
    for s, c in obs.terms.items():
        full = ["I"] * n
        for i, q in enumerate(window):
            full[q] = s[i]
        terms["".join(full)] = c
    return PauliObservable(n, terms)


def heisenberg_window(circuit: Circuit, qubit: int, letter: str, window=None) -> tuple[np.ndarray, list]:
    """Dense U^dag P_q U on the lightcone (or a supplied superset window)."""
    gates, lc = lightcone_gates(circuit, [qubit])
    window = lc if window is None else list(window)
    if not set(lc) <= set(window):
        raise ValueError("window does not contain the lightcone")
    u = window_unitary(gates, window)
    pw = pauli_matrix("".join(letter if q == qubit else "I" for q in window))
    return u.conj().T @ pw @ u, window
