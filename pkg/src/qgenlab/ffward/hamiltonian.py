"""Hidden fast-forwardable Hamiltonians H = U^dag (sum_j h_j Z_j) U with a brickwork scrambler U."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qcore.circuit import Circuit
from ..qcore.gates import Gate
from ..qcore.rng import make_rng
from ..qcore.statevector import apply_matrix, zero_state
from ..qcore.gates import gate_matrix

SHORT_OFFSET = 0
LONG_OFFSET = 10 ** 6
GRID_POINTS = 41


def cz_pairs(n: int, parity: int) -> list[tuple[int, int]]:
    """Nearest-neighbour pairs starting at qubit ``parity`` (0 for the first layer, 1 for the second)."""
    return [(a, a + 1) for a in range(parity, n - 1, 2)]


def build_scrambler(n: int, seed: int) -> Circuit:
    """PhasedXZ layer, CZ on (0,1),(2,3).., PhasedXZ layer, CZ on (1,2),(3,4).., PhasedXZ layer.

    Exponents are uniform in [0, 4].  For n = 2 the second CZ layer is empty
    and it is dropped together with its trailing PhasedXZ layer.
    """
    if n < 2:
        raise ValueError("scrambler needs at least 2 qubits")
    rng = make_rng(seed, "scrambler", n)

    def phxz_layer():
        return [Gate("PhasedXZ", (q,), tuple(rng.uniform(0.0, 4.0, 3))) for q in range(n)]

    moments = [phxz_layer(), [Gate("CZ", p) for p in cz_pairs(n, 0)], phxz_layer()]
    second = cz_pairs(n, 1)
    if second:
        moments += [[Gate("CZ", p) for p in second], phxz_layer()]
    return Circuit(n, moments)


@dataclass
class HiddenHamiltonian:
    n: int
    h: np.ndarray
    scrambler: Circuit
    seed: int

    @classmethod
    def random(cls, n: int, seed: int) -> "HiddenHamiltonian":
        h = make_rng(seed, "fields", n).uniform(-1.0, 1.0, n)
        return cls(n, h, build_scrambler(n, seed), seed)

    def matrix(self) -> np.ndarray:
        """Dense U^dag diag U (n <= 10)."""
        if self.n > 10:
            raise ValueError("dense Hamiltonian limited to 10 qubits")
        u = self.scrambler.unitary()
        bits = (np.arange(2 ** self.n)[:, None] >> np.arange(self.n)) & 1
        diag = ((1 - 2 * bits) * self.h).sum(axis=1)
        return u.conj().T @ (diag[:, None] * u)

    def to_dict(self) -> dict:
        return {"n": self.n, "h": self.h.tolist(), "seed": self.seed, "scrambler": self.scrambler.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "HiddenHamiltonian":
        return cls(int(d["n"]), np.asarray(d["h"], dtype=float), Circuit.from_dict(d["scrambler"]), int(d["seed"]))


def exact_evolution_circuit(ham: HiddenHamiltonian, t: float) -> Circuit:
    """U, then RZ(2 h_j t) on every qubit, then U^dag, which equals exp(-iHt)."""
    mid = [Gate("RZ", (j,), (2.0 * ham.h[j] * t,)) for j in range(ham.n)]
    return ham.scrambler + Circuit(ham.n, [mid]) + ham.scrambler.inverse()


def time_grid(kind: str = "short", points: int = GRID_POINTS) -> np.ndarray:
    """t = 3 pi k / 40 + 0.001 for k in [0, 40] ("short") or [10^6, 10^6 + 40] ("long")."""
    if kind == "short":
        k0 = SHORT_OFFSET
    elif kind == "long":
        k0 = LONG_OFFSET
    else:
        raise ValueError(f"unknown grid {kind!r}")
    k = np.arange(k0, k0 + points, dtype=float)
    return 3.0 * np.pi / 40.0 * k + 0.001


def exact_z_expectations(ham: HiddenHamiltonian, t: float) -> np.ndarray:
    """<Z_j> after exp(-iHt) on |0...0>, by statevector simulation of the exact circuit."""
    n = ham.n
    psi = zero_state(n)
    for g in exact_evolution_circuit(ham, t).gates():
        psi = apply_matrix(psi, gate_matrix(g), g.targets, n)
    p = np.abs(psi) ** 2
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
    return (p[:, None] * (1 - 2 * bits)).sum(axis=0)
