"""The block ansatz: five R(x,y,z) layers around CZ layers in the order L1, L2, L2, L1."""

from __future__ import annotations

from dataclasses import dataclass

import jax
import jax.numpy as jnp
import numpy as np

from ..qcore.circuit import Circuit
from ..qcore.gates import Gate
from .hamiltonian import cz_pairs

jax.config.update("jax_enable_x64", True)

R_LAYERS = 5
CZ_ORDER = (0, 1, 1, 0)  # parity of each CZ layer between consecutive R layers
BLOCK = 4
MARGIN = 2


def block_window(block: int, n: int, size: int = BLOCK, margin: int = MARGIN) -> tuple[int, ...]:
    lo = block * size
    return tuple(range(max(0, lo - margin), min(n, lo + size + margin)))


def window_pairs(window, parity: int) -> list[tuple[int, int]]:
    """Global CZ pairs of the given parity that lie inside ``window``."""
    w = set(window)
    return [p for p in cz_pairs(max(window) + 1, parity) if p[0] in w and p[1] in w]


@dataclass
class BlockAnsatz:
    """Parameters theta[layer, position, (x, y, z)] on the qubits of ``window``."""

    window: tuple

    @property
    def num_params(self) -> int:
        return R_LAYERS * len(self.window) * 3

    @property
    def num_r_gates(self) -> int:
        return R_LAYERS * len(self.window)

    def circuit(self, theta, n: int) -> Circuit:
        theta = np.asarray(theta, dtype=float).reshape(R_LAYERS, len(self.window), 3)
        moments = []
        for layer in range(R_LAYERS):
            moments.append([Gate("R", (q,), tuple(theta[layer, i])) for i, q in enumerate(self.window)])
            if layer < len(CZ_ORDER):
                pairs = window_pairs(self.window, CZ_ORDER[layer])
                if pairs:
                    moments.append([Gate("CZ", p) for p in pairs])
        return Circuit(n, moments)


def _rx(a):
    c, s = jnp.cos(a / 2), jnp.sin(a / 2)
    return jnp.array([[c, -1j * s], [-1j * s, c]])


def _ry(a):
    c, s = jnp.cos(a / 2), jnp.sin(a / 2)
    return jnp.array([[c, -s], [s, c]], dtype=complex)


def _rz(a):
    return jnp.array([[jnp.exp(-0.5j * a), 0], [0, jnp.exp(0.5j * a)]])


def _r(p):
    return _rx(p[0]) @ _ry(p[1]) @ _rz(p[2])


def _cz_diag(window, parity: int) -> np.ndarray:
    w = len(window)
    bits = (np.arange(2 ** w)[:, None] >> np.arange(w)) & 1
    d = np.ones(2 ** w)
    for a, b in window_pairs(window, parity):
        d *= 1 - 2 * (bits[:, window.index(a)] * bits[:, window.index(b)])
    return d


def ansatz_unitary_fn(window):
    """theta -> dense window unitary, traceable by JAX."""
    window = tuple(window)
    w = len(window)
    diags = [jnp.asarray(_cz_diag(window, p)) for p in CZ_ORDER]

    def layer(params):  # params (w, 3); qubit window[0] is least significant
        m = jnp.ones((1, 1), dtype=complex)
        for i in range(w):
            m = jnp.kron(_r(params[i]), m)
        return m

    def unitary(theta):
        th = theta.reshape(R_LAYERS, w, 3)
        u = layer(th[0])
        for l in range(1, R_LAYERS):
            u = layer(th[l]) @ (diags[l - 1][:, None] * u)
        return u

    return unitary
