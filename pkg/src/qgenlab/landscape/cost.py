"""Per-qubit reduced channels of W = V^dag T, the local cost and Mode-1 deviations.

R_PQ(k) = Tr(P_k V^dag T Q_k T^dag V) / 2^n is evaluated by splitting V
into halves and contracting the two Heisenberg-evolved pieces on the
intersection of their supports, so n only enters through lightcones.
"""

from __future__ import annotations

import numpy as np

from ..qcore.circuit import Circuit
from ..qcore.linalg import partial_trace
from ..qcore.pauli import heisenberg_window
from ..qcore.statevector import apply_matrix
from ..qcore.gates import gate_matrix

_PQ = "XYZ"


def _pair_trace(a, wa, b, wb) -> complex:
    """Tr(A B) / 2^|wa u wb| for operators on windows wa, wb (identity elsewhere)."""
    inter = sorted(set(wa) & set(wb))
    ar = partial_trace(a, wa, inter) / 2 ** (len(wa) - len(inter))
    br = partial_trace(b, wb, inter) / 2 ** (len(wb) - len(inter))
    if not inter:
        return complex(ar[0, 0] * br[0, 0])
    # order of inter inside ar follows wa's order; align with wb's order
    oa = [q for q in wa if q in inter]
    ob = [q for q in wb if q in inter]
    if oa != ob:
        ar = _reorder(ar, oa, ob)
    return complex(np.trace(ar @ br) / 2 ** len(inter))


def _reorder(op, src, dst):
    w = len(src)
    t = op.reshape((2,) * (2 * w))
    perm = [w - 1 - src.index(q) for q in reversed(dst)]
    t = t.transpose(perm + [w + p for p in perm])
    return t.reshape(op.shape)


def channel_ptms(target: Circuit, ansatz: Circuit, qubits=None) -> np.ndarray:
    """Array (len(qubits), 3, 3) of single-qubit Pauli transfer blocks of W = V^dag T."""
    n = target.num_qubits
    if ansatz.num_qubits != n:
        raise ValueError("target and ansatz sizes differ")
    qubits = range(n) if qubits is None else qubits
    half = ansatz.depth // 2
    va = Circuit(n, ansatz.moments[:half])
    vb = Circuit(n, ansatz.moments[half:])
    left = va.inverse()          # Heisenberg through this gives V_a P V_a^dag
    right = vb + target.inverse()  # gives (T^dag V_b)^dag Q (T^dag V_b)
    out = []
    for k in qubits:
        a = {p: heisenberg_window(left, k, p) for p in _PQ}
        b = {q: heisenberg_window(right, k, q) for q in _PQ}
        r = np.empty((3, 3))
        for i, p in enumerate(_PQ):
            for j, q in enumerate(_PQ):
                r[i, j] = _pair_trace(a[p][0], a[p][1], b[q][0], b[q][1]).real
        out.append(r)
    return np.array(out)


def qubit_local_costs(target: Circuit, ansatz: Circuit) -> np.ndarray:
    """(2/3)(1 - F) per qubit, i.e. 1/2 - tr(R_k)/6."""
    r = channel_ptms(target, ansatz)
    return 0.5 - np.trace(r, axis1=1, axis2=2) / 6.0


def local_cost(target: Circuit, ansatz: Circuit) -> float:
    return float(qubit_local_costs(target, ansatz).sum())


def channel_deviations(target: Circuit, ansatz: Circuit, qubits=None) -> np.ndarray:
    """||S_k - I_4||_F^2 per qubit of the reduced channel of V^dag T."""
    r = channel_ptms(target, ansatz, qubits)
    return np.sum((r - np.eye(3)) ** 2, axis=(1, 2))


_STAB = {
    "0": np.array([1, 0], dtype=complex), "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / np.sqrt(2), "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
    "y+": np.array([1, 1j]) / np.sqrt(2), "y-": np.array([1, -1j]) / np.sqrt(2),
}
STAB_LABELS = tuple(_STAB)


def local_cost_montecarlo(target: Circuit, ansatz: Circuit, samples: int, rng) -> tuple[float, float]:
    """Stabilizer-input average of sum_i (1 - <psi_i| rho_i |psi_i>) with its standard error."""
    n = target.num_qubits
    if n > 12:
        raise ValueError("Monte-Carlo cost limited to 12 qubits")
    circ = target + ansatz.inverse()
    vals = np.empty(samples)
    for s in range(samples):
        labels = rng.integers(0, 6, size=n)
        vecs = [_STAB[STAB_LABELS[l]] for l in labels]
        psi = np.ones(1, dtype=complex)
        for v in vecs:
            psi = np.kron(v, psi)
        for g in circ.gates():
            psi = apply_matrix(psi, gate_matrix(g), g.targets, n)
        t = psi.reshape((2,) * n)
        total = 0.0
        for i in range(n):
            ax = n - 1 - i
            m = np.moveaxis(t, ax, 0).reshape(2, -1)
            rho = m @ m.conj().T
            total += 1.0 - float(np.real(vecs[i].conj() @ rho @ vecs[i]))
        vals[s] = total
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))
