"""Layered H / RZ / CZ deep circuits and their IDQNN embedding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qcore.gates import H2, Z2, rz
from ..qcore.statevector import apply_matrix, zero_state
from .lattice import IdqnnModel, LatticeGraph


@dataclass(frozen=True)
class LayeredRound:
    hadamard: tuple[bool, ...]
    rz: tuple[float, ...]
    cz: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class LayeredDeepCircuit:
    """m qubits on a line; each round is H layer, RZ layer, nearest-neighbour CZ layer."""

    m: int
    rounds: tuple[LayeredRound, ...]

    def __post_init__(self):
        if self.m < 1 or not self.rounds:
            raise ValueError("need m >= 1 and at least one round")
        for r in self.rounds:
            if len(r.hadamard) != self.m or len(r.rz) != self.m:
                raise ValueError("round layers must cover every qubit")
            for a, b in r.cz:
                if abs(a - b) != 1 or not (0 <= min(a, b) and max(a, b) < self.m):
                    raise ValueError(f"CZ {(a, b)} is not nearest-neighbour on the line")

    @property
    def r(self) -> int:
        return len(self.rounds)


def build_idqnn_from_layered(circ: LayeredDeepCircuit) -> tuple[IdqnnModel, np.ndarray]:
    """Embed D into an m x (r+1) lattice driven by the all-zero input.

    Slice j (0-based, j < r) carries round j's RZ (beta = theta/2) and CZ
    set; the extra slice r is a bare readout slice. With x = 0 the output
    bits are (y' over slices 0..r-2, r-1 uniform auxiliary bits on slice r-1,
    Z-basis outcome of D(y')|0> on slice r).
    """
    m, r = circ.m, circ.r
    for rd in circ.rounds:
        if not all(rd.hadamard):
            raise ValueError("every round must open with a full Hadamard layer")
    dims = (r + 1, m)
    edges = []
    for j in range(r):
        for q in range(m):
            edges.append((j * m + q, (j + 1) * m + q))
        for a, b in circ.rounds[j].cz:
            edges.append((j * m + a, j * m + b))
    beta = np.zeros((r + 1) * m)
    for j, rd in enumerate(circ.rounds):
        beta[j * m:(j + 1) * m] = 0.5 * np.asarray(rd.rz)
    model = IdqnnModel(LatticeGraph(dims, frozenset(edges)), beta)
    return model, np.zeros((r + 1) * m, dtype=np.uint8)


def simulate_injected(circ: LayeredDeepCircuit, yprime: np.ndarray) -> np.ndarray:
    """Z-basis output distribution of D(y')|0^m>, Z injected at the end of rounds 1..r-1."""
    m = circ.m
    psi = zero_state(m)
    for j, rd in enumerate(circ.rounds):
        for q in range(m):
            if rd.hadamard[q]:
                psi = apply_matrix(psi, H2, (q,), m)
            psi = apply_matrix(psi, rz(rd.rz[q]), (q,), m)
        for a, b in rd.cz:
            mask = ((np.arange(2 ** m) >> a) & (np.arange(2 ** m) >> b) & 1).astype(bool)
            psi = np.where(mask, -psi, psi)
        if j < circ.r - 1:
            for q in range(m):
                if yprime[j * m + q]:
                    psi = apply_matrix(psi, Z2, (q,), m)
    return np.abs(psi) ** 2


def injected_joint_distribution(circ: LayeredDeepCircuit) -> np.ndarray:
    """Reference law over the m(r+1) output bits of the embedded model."""
    m, r = circ.m, circ.r
    n_prime = (r - 1) * m
    out = np.zeros(2 ** ((r + 1) * m))
    w = 2.0 ** -(n_prime + m)
    for yp in range(2 ** n_prime):
        bits = (yp >> np.arange(n_prime)) & 1
        pf = simulate_injected(circ, bits)
        for aux in range(2 ** m):
            base = yp | (aux << n_prime)
            idx = base | (np.arange(2 ** m) << (r * m))
            out[idx] += w * pf
    return out


def random_layered(m: int, r: int, rng, cz_density: float = 0.5) -> LayeredDeepCircuit:
    rounds = []
    for _ in range(r):
        cz = tuple((q, q + 1) for q in range(m - 1) if rng.random() < cz_density)
        rounds.append(LayeredRound((True,) * m, tuple(rng.uniform(0, 2 * np.pi, m)), cz))
    return LayeredDeepCircuit(m, tuple(rounds))
