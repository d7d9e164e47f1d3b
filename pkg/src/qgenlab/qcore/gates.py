"""Gate definitions and closed-form matrices.

Multi-qubit matrices use a little-endian local index: for targets
``(t0, t1, ...)`` the local basis index is ``b(t0) + 2 b(t1) + ...``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ONE_QUBIT = {"H", "X", "Y", "Z", "S", "SDG", "RZ", "RX", "RY", "R", "PhasedXZ"}
TWO_QUBIT = {"CZ", "CNOT", "SWAP", "SwapPow"}
CLIFFORD = {"H", "S", "SDG", "X", "Y", "Z", "CZ", "CNOT", "SWAP"}
NUM_PARAMS = {"RZ": 1, "RX": 1, "RY": 1, "R": 3, "SwapPow": 1, "PhasedXZ": 3}

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
H2 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S2 = np.diag([1, 1j]).astype(complex)
PAULI = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def r_xyz(x: float, y: float, z: float) -> np.ndarray:
    """R(x, y, z) = RX(x) RY(y) RZ(z) as an operator product."""
    return rx(x) @ ry(y) @ rz(z)


def zpow(e: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * np.pi * e)])


def xpow(e: float) -> np.ndarray:
    return H2 @ zpow(e) @ H2


def phased_xz(x: float, z: float, a: float) -> np.ndarray:
    """Z^-a X^x Z^a Z^z applied in that time order."""
    return zpow(z) @ zpow(a) @ xpow(x) @ zpow(-a)


def swap_pow(p: float) -> np.ndarray:
    g = np.exp(0.5j * np.pi * p)
    c, s = g * np.cos(0.5 * np.pi * p), -1j * g * np.sin(0.5 * np.pi * p)
    return np.array([[1, 0, 0, 0], [0, c, s, 0], [0, s, c, 0], [0, 0, 0, 1]], dtype=complex)


CZ4 = np.diag([1, 1, 1, -1]).astype(complex)
SWAP4 = swap_pow(1.0).real.astype(complex)
# control is the first target (local bit 0)
CNOT4 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)

_FIXED = {"H": H2, "X": X2, "Y": Y2, "Z": Z2, "S": S2, "SDG": S2.conj(),
          "CZ": CZ4, "CNOT": CNOT4, "SWAP": SWAP4}


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"repeated target in {self.kind} {self.targets}")
        if self.kind == "Dense":
            if self.matrix is None:
                raise ValueError("Dense gate needs a matrix")
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (2 ** len(self.targets),) * 2 or len(self.targets) not in (1, 2):
                raise ValueError("Dense gate must act on 1 or 2 qubits with matching shape")
            if not np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=1e-10):
                raise ValueError("Dense gate matrix is not unitary")
            object.__setattr__(self, "matrix", m)
            return
        if self.kind in ONE_QUBIT:
            arity = 1
        elif self.kind in TWO_QUBIT:
            arity = 2
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.targets) != arity:
            raise ValueError(f"{self.kind} acts on {arity} qubit(s), got {self.targets}")
        if len(self.params) != NUM_PARAMS.get(self.kind, 0):
            raise ValueError(f"{self.kind} expects {NUM_PARAMS.get(self.kind, 0)} params")

    def unitary(self) -> np.ndarray:
        return gate_matrix(self)

    def inverse(self) -> "Gate":
        k = self.kind
        if k in ("H", "X", "Y", "Z", "CZ", "CNOT", "SWAP"):
            return self
        if k == "S":
            return Gate("SDG", self.targets)
        if k == "SDG":
            return Gate("S", self.targets)
        if k in ("RZ", "RX", "RY"):
            return Gate(k, self.targets, (-self.params[0],))
        return Gate("Dense", self.targets, matrix=gate_matrix(self).conj().T)

    @property
    def is_clifford(self) -> bool:
        return self.kind in CLIFFORD


def gate_matrix(g: Gate) -> np.ndarray:
    k = g.kind
    if k == "Dense":
        return g.matrix
    if k in _FIXED:
        return _FIXED[k]
    p = g.params
    if k == "RZ":
        return rz(p[0])
    if k == "RX":
        return rx(p[0])
    if k == "RY":
        return ry(p[0])
    if k == "R":
        return r_xyz(*p)
    if k == "PhasedXZ":
        return phased_xz(*p)
    if k == "SwapPow":
        return swap_pow(p[0])
    raise ValueError(f"unknown gate kind {k!r}")
