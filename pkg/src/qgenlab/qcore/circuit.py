"""Moment-structured circuits with a deterministic JSON interchange format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .gates import Gate, gate_matrix
from .statevector import apply_matrix


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    moments: tuple[tuple[Gate, ...], ...] = field(default_factory=tuple)

    def __post_init__(self):
        moments = tuple(tuple(m) for m in self.moments)
        object.__setattr__(self, "moments", moments)
        for m in moments:
            seen: set[int] = set()
            for g in m:
                for q in g.targets:
                    if not 0 <= q < self.num_qubits:
                        raise IndexError(f"target {q} out of range for {self.num_qubits} qubits")
                    if q in seen:
                        raise ValueError(f"qubit {q} used twice in one moment")
                    seen.add(q)

    @classmethod
    def from_gates(cls, num_qubits: int, gates) -> "Circuit":
        """Greedy earliest-moment packing of a gate sequence."""
        moments: list[list[Gate]] = []
        frontier = [0] * num_qubits
        for g in gates:
            m = max((frontier[q] for q in g.targets), default=0)
            if m == len(moments):
                moments.append([])
            moments[m].append(g)
            for q in g.targets:
                frontier[q] = m + 1
        return cls(num_qubits, tuple(tuple(m) for m in moments))

    @property
    def depth(self) -> int:
        return len(self.moments)

    def gates(self):
        for m in self.moments:
            yield from m

    def gate_count(self) -> int:
        return sum(len(m) for m in self.moments)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise ValueError("qubit counts differ")
        return Circuit(self.num_qubits, self.moments + other.moments)

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, tuple(tuple(g.inverse() for g in m) for m in reversed(self.moments)))

    def remap(self, mapping, num_qubits: int) -> "Circuit":
        return Circuit(num_qubits, tuple(
            tuple(Gate(g.kind, tuple(mapping[q] for q in g.targets), g.params, g.matrix) for g in m)
            for m in self.moments))

    def unitary(self) -> np.ndarray:
        n = self.num_qubits
        u = np.eye(2 ** n, dtype=complex)
        # rows of u.T are columns of u; apply gates to each column
        cols = u
        for g in self.gates():
            cols = apply_matrix(cols, gate_matrix(g), g.targets, n)
        return cols.T

    def to_dict(self) -> dict:
        ms = []
        for m in self.moments:
            row = []
            for g in m:
                d = {"kind": g.kind, "targets": list(g.targets), "params": list(g.params)}
                if g.kind == "Dense":
                    d["params"] = [[float(z.real), float(z.imag)] for z in g.matrix.reshape(-1)]
                row.append(d)
            ms.append(row)
        return {"num_qubits": self.num_qubits, "moments": ms}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        moments = []
        for m in d["moments"]:
            row = []
            for g in m:
                if g["kind"] == "Dense":
                    flat = np.array([complex(a, b) for a, b in g["params"]])
                    k = len(g["targets"])
                    row.append(Gate("Dense", tuple(g["targets"]), matrix=flat.reshape(2 ** k, 2 ** k)))
                else:
                    row.append(Gate(g["kind"], tuple(g["targets"]), tuple(g["params"])))
            moments.append(tuple(row))
        return cls(int(d["num_qubits"]), tuple(moments))

    @classmethod
    def from_json(cls, s: str) -> "Circuit":
        return cls.from_dict(json.loads(s))


def restrict(circuit: Circuit, gate_filter) -> list[Gate]:
    return [g for g in circuit.gates() if gate_filter(g)]


def window_unitary(gates, window) -> np.ndarray:
    """Dense unitary of ``gates`` relabelled onto the ordered qubit list ``window``."""
    pos = {q: i for i, q in enumerate(window)}
    w = len(window)
    cols = np.eye(2 ** w, dtype=complex)
    for g in gates:
        cols = apply_matrix(cols, gate_matrix(g), tuple(pos[q] for q in g.targets), w)
    return cols.T


def random_brickwork(n: int, depth: int, rng) -> Circuit:
    """1D brickwork of Haar-random two-qubit Dense gates; layer d starts at qubit d % 2."""
    from .linalg import random_unitary

    moments = []
    for d in range(depth):
        moments.append(tuple(Gate("Dense", (a, a + 1), matrix=random_unitary(4, rng))
                             for a in range(d % 2, n - 1, 2)))
    return Circuit(n, tuple(m for m in moments if m))
