"""Superoperator windows and reduced single-qubit channels.

The production path evaluates single-qubit Pauli transfer matrices
R_PQ = Tr(P_k W Q_k W^dag) / 2^w directly.  The column-stacking
superoperator with a normalized partial trace is kept as a reference
implementation for small windows; the two agree because the Frobenius
distance is basis independent.
"""

from __future__ import annotations

import numpy as np

from .gates import PAULI
from .statevector import apply_matrix

SUPEROP_LIMIT = 8
DENSE_LIMIT = 12
_PQ = ("X", "Y", "Z")


def superoperator(u: np.ndarray) -> np.ndarray:
    """Column-stacking representation: vec(U rho U^dag) = (conj(U) kron U) vec(rho)."""
    u = np.asarray(u, dtype=complex)
    if int(np.log2(u.shape[0])) > SUPEROP_LIMIT:
        raise ValueError("superoperator window too large")
    return np.kron(u.conj(), u)


def reduce_superoperator(sop: np.ndarray, n: int, keep: int) -> np.ndarray:
    """Normalized partial trace of a superoperator over all qubits except ``keep``.

    Returns the 4x4 column-stacking superoperator of rho -> Tr_rest[W (rho x I/2^(n-1)) W^dag].
    """
    # vec index = col * d + row ; row/col are little-endian qubit indices
    t = sop.reshape((2,) * (4 * n))
    # axis layout (big-endian within each block): out_col, out_row, in_col, in_row
    def ax(block, q):
        return block * n + (n - 1 - q)
    rest = [q for q in range(n) if q != keep]
    # trace output: out_row_q == out_col_q ; average input: in_row_q == in_col_q
    free = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    names = [None] * (4 * n)
    for q in rest:
        o, i = next(free), next(free)
        names[ax(0, q)] = o
        names[ax(1, q)] = o
        names[ax(2, q)] = i
        names[ax(3, q)] = i
    kept = [next(free) for _ in range(4)]
    for b in range(4):
        names[ax(b, keep)] = kept[b]
    expr = "".join(names) + "->" + "".join(kept)
    out = np.einsum(expr, t) / 2 ** (n - 1)
    return out.reshape(4, 4)


def channel_superop_oracle(u: np.ndarray, targets) -> float:
    """Reference deviation sum_k ||S_k - I_4||_F^2 through the full superoperator."""
    n = int(round(np.log2(u.shape[0])))
    sop = superoperator(u)
    return float(sum(np.sum(np.abs(reduce_superoperator(sop, n, k) - np.eye(4)) ** 2) for k in targets))


def _pauli_left(w: np.ndarray, letter: str, q: int, n: int) -> np.ndarray:
    """P_q @ W (acts on row index)."""
    # columns of W are vectors; P_q W = apply to each column
    return apply_matrix(w.T, PAULI[letter], (q,), n).T


def _pauli_right(w: np.ndarray, letter: str, q: int, n: int) -> np.ndarray:
    """W @ Q_q = (Q_q^T W^T)^T."""
    return apply_matrix(w, PAULI[letter].T, (q,), n)


def single_qubit_ptm(w: np.ndarray, k: int) -> np.ndarray:
    """3x3 block R_PQ = Tr(P_k W Q_k W^dag)/2^n of the reduced channel on qubit k."""
    w = np.asarray(w, dtype=complex)
    n = int(round(np.log2(w.shape[0])))
    left = {p: _pauli_left(w, p, k, n) for p in _PQ}
    right = {q: _pauli_right(w, q, k, n) for q in _PQ}
    d = w.shape[0]
    r = np.empty((3, 3))
    for a, p in enumerate(_PQ):
        for b, q in enumerate(_PQ):
            # Tr(P W Q W^dag) = sum_ij (P W)_ij conj((W Q)_ij) for Hermitian Q
            r[a, b] = float(np.real(np.vdot(right[q], left[p]))) / d
    return r


def qubit_deviation(w: np.ndarray, k: int) -> float:
    r = single_qubit_ptm(w, k)
    return float(np.sum((r - np.eye(3)) ** 2))


def window_channel_deviation(u_window: np.ndarray, k_targets) -> float:
    """Sum over targets of ||reduced channel - identity||_F^2 (superoperator form)."""
    u_window = np.asarray(u_window, dtype=complex)
    n = int(round(np.log2(u_window.shape[0])))
    if n > DENSE_LIMIT:
        raise ValueError(f"window of {n} qubits exceeds dense limit {DENSE_LIMIT}")
    return float(sum(qubit_deviation(u_window, k) for k in k_targets))


def local_fidelity_cost(w: np.ndarray, k: int) -> float:
    """(2/3)(1 - F_e) of the reduced channel on qubit k, i.e. 1/2 - trace(R)/6."""
    r = single_qubit_ptm(w, k)
    return 0.5 - np.trace(r) / 6.0
