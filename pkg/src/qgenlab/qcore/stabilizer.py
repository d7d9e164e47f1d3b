"""Stabilizer tableau with destabilizers (CHP-style update rules)."""

from __future__ import annotations

import numpy as np

from .gates import Gate


class StabilizerTableau:
    """Rows 0..n-1 are destabilizers, n..2n-1 stabilizers, row 2n is scratch."""

    def __init__(self, num_qubits: int):
        n = num_qubits
        self.num_qubits = n
        self.x = np.zeros((2 * n + 1, n), dtype=bool)
        self.z = np.zeros((2 * n + 1, n), dtype=bool)
        self.r = np.zeros(2 * n + 1, dtype=bool)
        idx = np.arange(n)
        self.x[idx, idx] = True
        self.z[n + idx, idx] = True

    def copy(self) -> "StabilizerTableau":
        t = StabilizerTableau.__new__(StabilizerTableau)
        t.num_qubits = self.num_qubits
        t.x, t.z, t.r = self.x.copy(), self.z.copy(), self.r.copy()
        return t

    # single-qubit Cliffords
    def h(self, a: int):
        xa, za = self.x[:, a].copy(), self.z[:, a].copy()
        self.r ^= xa & za
        self.x[:, a], self.z[:, a] = za, xa

    def s(self, a: int):
        self.r ^= self.x[:, a] & self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def sdg(self, a: int):
        self.z_gate(a)
        self.s(a)

    def x_gate(self, a: int):
        self.r ^= self.z[:, a]

    def z_gate(self, a: int):
        self.r ^= self.x[:, a]

    def y_gate(self, a: int):
        self.r ^= self.x[:, a] ^ self.z[:, a]

    def cnot(self, a: int, b: int):
        xa, xb, za, zb = self.x[:, a], self.x[:, b], self.z[:, a], self.z[:, b]
        self.r ^= xa & zb & ~(xb ^ za)
        self.x[:, b] ^= xa
        self.z[:, a] ^= zb

    def cz(self, a: int, b: int):
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    def swap(self, a: int, b: int):
        self.cnot(a, b)
        self.cnot(b, a)
        self.cnot(a, b)

    def apply(self, gate: Gate):
        k, t = gate.kind, gate.targets
        ops = {"H": self.h, "S": self.s, "SDG": self.sdg, "X": self.x_gate,
               "Y": self.y_gate, "Z": self.z_gate, "CZ": self.cz, "CNOT": self.cnot, "SWAP": self.swap}
        if k not in ops:
            raise ValueError(f"non-Clifford gate {k} rejected by the stabilizer simulator")
        ops[k](*t)

    # row arithmetic
    def _rowsum(self, targets: np.ndarray, src: int):
        """Row h <- row h * row src for every h in ``targets``."""
        if targets.size == 0:
            return
        x1, z1 = self.x[src].astype(np.int8), self.z[src].astype(np.int8)
        x2, z2 = self.x[targets].astype(np.int8), self.z[targets].astype(np.int8)
        g = np.where(
            (x1 == 1) & (z1 == 1), z2 - x2,
            np.where((x1 == 1) & (z1 == 0), z2 * (2 * x2 - 1),
                     np.where((x1 == 0) & (z1 == 1), x2 * (1 - 2 * z2), 0)))
        total = 2 * self.r[targets].astype(int) + 2 * int(self.r[src]) + g.sum(axis=1)
        self.r[targets] = (total % 4) == 2
        self.x[targets] ^= self.x[src]
        self.z[targets] ^= self.z[src]

    def measure_z(self, a: int, rng=None, forced: int | None = None) -> tuple[int, bool]:
        """Measure Z_a. Returns (bit, random_flag). ``forced`` fixes the random outcome.

        A forced value contradicting a deterministic outcome raises ValueError.
        """
        n = self.num_qubits
        stab = np.nonzero(self.x[n:2 * n, a])[0]
        if stab.size:
            p = n + int(stab[0])
            others = np.nonzero(self.x[:2 * n, a])[0]
            others = others[others != p]
            self._rowsum(others, p)
            self.x[p - n], self.z[p - n], self.r[p - n] = self.x[p], self.z[p], self.r[p]
            self.x[p] = False
            self.z[p] = False
            self.z[p, a] = True
            bit = int(rng.integers(2)) if forced is None else int(forced)
            self.r[p] = bool(bit)
            return bit, True
        s = 2 * n
        self.x[s] = False
        self.z[s] = False
        self.r[s] = False
        for i in np.nonzero(self.x[:n, a])[0]:
            self._rowsum(np.array([s]), int(i) + n)
        bit = int(self.r[s])
        if forced is not None and int(forced) != bit:
            raise ValueError("forced outcome contradicts a deterministic measurement")
        return bit, False

    def measure(self, a: int, basis: str = "Z", rng=None, forced=None) -> tuple[int, bool]:
        if basis == "Z":
            return self.measure_z(a, rng, forced)
        if basis == "X":
            self.h(a)
            out = self.measure_z(a, rng, forced)
            self.h(a)
            return out
        if basis == "Y":
            self.sdg(a)
            self.h(a)
            out = self.measure_z(a, rng, forced)
            self.h(a)
            self.s(a)
            return out
        raise ValueError(f"unknown basis {basis}")

    def reset(self, a: int, rng):
        bit, _ = self.measure_z(a, rng)
        if bit:
            self.x_gate(a)

    def stabilizer_group_generators(self) -> list[tuple[np.ndarray, np.ndarray, bool]]:
        n = self.num_qubits
        return [(self.x[i].copy(), self.z[i].copy(), bool(self.r[i])) for i in range(n, 2 * n)]

    def commutation_ok(self) -> bool:
        n = self.num_qubits
        x, z = self.x[n:2 * n].astype(int), self.z[n:2 * n].astype(int)
        sym = (x @ z.T + z @ x.T) % 2
        return not sym.any()


def stabilizer_apply(tableau: StabilizerTableau, gate: Gate) -> StabilizerTableau:
    tableau.apply(gate)
    return tableau


def stabilizer_measure(tableau: StabilizerTableau, qubit: int, basis: str, rng) -> tuple[StabilizerTableau, int]:
    bit, _ = tableau.measure(qubit, basis, rng)
    return tableau, bit
