"""SWAP-4 targets, parameterized SWAP ansaetze and the trap configurations theta_x."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qcore.circuit import Circuit
from ..qcore.gates import SWAP4, Gate

ANSATZ_KINDS = ("layered3", "swappow")


@dataclass(frozen=True)
class SwapTargetSpec:
    n: int
    S: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "S", tuple(sorted(int(j) for j in self.S)))
        nb = self.n // 4
        if any(j < 0 or j >= nb for j in self.S) or len(set(self.S)) != len(self.S):
            raise ValueError(f"block indices {self.S} outside 0..{nb - 1}")

    @classmethod
    def all_blocks(cls, n: int) -> "SwapTargetSpec":
        return cls(n, tuple(range(n // 4)))


def build_swap_target(spec: SwapTargetSpec) -> Circuit:
    """Product of SWAP(4j, 4j+3) over j in S (0-based qubits)."""
    gates = [Gate("SWAP", (4 * j, 4 * j + 3)) for j in spec.S]
    return Circuit(spec.n, (tuple(gates),) if gates else ())


def exp_swap(theta: float) -> np.ndarray:
    """exp(i theta SWAP) = cos(theta) I + i sin(theta) SWAP."""
    return np.cos(theta) * np.eye(4) + 1j * np.sin(theta) * SWAP4


def layered3_pairs(n: int) -> tuple[list, list, list]:
    a = [(2 * m, 2 * m + 1) for m in range(n // 2)]
    b = [(2 * m + 1, 2 * m + 2) for m in range((n - 1) // 2)]
    return a, b, list(a)


def swappow_pairs(n: int, reps: int = 2) -> list[list]:
    even = [(2 * m, 2 * m + 1) for m in range(n // 2)]
    odd = [(2 * m + 1, 2 * m + 2) for m in range((n - 1) // 2)]
    return [layer for _ in range(reps) for layer in (even, odd)]


def num_params(kind: str, n: int) -> int:
    if kind == "layered3":
        return sum(len(p) for p in layered3_pairs(n))
    if kind == "swappow":
        return sum(len(p) for p in swappow_pairs(n))
    raise ValueError(f"unknown ansatz kind {kind!r}")


def ansatz_template(kind: str, n: int) -> list[list[tuple[tuple[int, int], int]]]:
    """Moments in time order; each entry is (pair, parameter index)."""
    if kind == "layered3":
        a, b, c = layered3_pairs(n)
        # U = L1 L2 L3 as an operator product, so L3 acts first in time
        sizes = [len(a), len(b), len(c)]
        offs = [0, sizes[0], sizes[0] + sizes[1]]
        layers = [(a, offs[0]), (b, offs[1]), (c, offs[2])]
        return [[(p, off + i) for i, p in enumerate(pairs)] for pairs, off in reversed(layers)]
    if kind == "swappow":
        out, k = [], 0
        for pairs in swappow_pairs(n):
            out.append([(p, k + i) for i, p in enumerate(pairs)])
            k += len(pairs)
        return out
    raise ValueError(f"unknown ansatz kind {kind!r}")


def ansatz_unitary(kind: str, theta, n: int) -> Circuit:
    """Circuit of the chosen ansatz; layered3 gates are exp(i theta SWAP), swappow gates SWAP^p."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (num_params(kind, n),):
        raise ValueError(f"{kind} on {n} qubits expects {num_params(kind, n)} parameters")
    moments = []
    for layer in ansatz_template(kind, n):
        gates = []
        for pair, k in layer:
            if kind == "layered3":
                gates.append(Gate("Dense", pair, matrix=exp_swap(theta[k])))
            else:
                gates.append(Gate("SwapPow", pair, (theta[k],)))
        moments.append(tuple(gates))
    return Circuit(n, tuple(moments))


def _layered3_index(n: int):
    a, b, _ = layered3_pairs(n)
    return (lambda m: m), (lambda m: len(a) + m), (lambda m: len(a) + len(b) + m)


def block_parameter_indices(n: int, j: int) -> list[int]:
    """theta_B for block j: A[2j], A[2j+1], B[2j], C[2j], C[2j+1]."""
    ia, ib, ic = _layered3_index(n)
    return [ia(2 * j), ia(2 * j + 1), ib(2 * j), ic(2 * j), ic(2 * j + 1)]


def link_parameter_indices(n: int) -> list[int]:
    _, ib, _ = _layered3_index(n)
    return [ib(2 * j + 1) for j in range(n // 4 - 1)]


def enumerate_theta_x(spec: SwapTargetSpec, x: int) -> np.ndarray:
    """Blocks whose bit in x is 1 get pi/2 on all five block angles; everything else is 0."""
    k = len(spec.S)
    if not 0 <= x < 2 ** k:
        raise ValueError(f"x must lie in [0, {2 ** k})")
    theta = np.zeros(num_params("layered3", spec.n))
    for pos, j in enumerate(spec.S):
        if (x >> pos) & 1:
            theta[block_parameter_indices(spec.n, j)] = np.pi / 2
    return theta


def theta_star(spec: SwapTargetSpec) -> np.ndarray:
    return enumerate_theta_x(spec, 2 ** len(spec.S) - 1)
