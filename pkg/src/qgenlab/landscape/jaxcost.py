"""Differentiable Mode-1 deviations for parameterized two-qubit-gate ansaetze (JAX, float64)."""

from __future__ import annotations

import jax

jax.config.update("jax_enable_x64", True)

import jax.numpy as jnp  # noqa: E402
import numpy as np  # noqa: E402

from ..qcore.circuit import Circuit  # noqa: E402
from ..qcore.pauli import PauliString, heisenberg_evolve, pauli_matrix  # noqa: E402
from .targets import ansatz_template  # noqa: E402

_PQ = "XYZ"
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def _swap_pow(p):
    g = jnp.exp(0.5j * jnp.pi * p)
    c = g * jnp.cos(0.5 * jnp.pi * p)
    s = -1j * g * jnp.sin(0.5 * jnp.pi * p)
    one, zero = jnp.ones_like(c), jnp.zeros_like(c)
    return jnp.array([[one, zero, zero, zero], [zero, c, s, zero], [zero, s, c, zero], [zero, zero, zero, one]])


def _exp_swap(t):
    return jnp.cos(t) * jnp.eye(4) + 1j * jnp.sin(t) * _SWAP


_GATE_FN = {"swappow": _swap_pow, "layered3": _exp_swap}


def _apply(u, mat, targets, w):
    """Left-multiply the window matrix u (columns as vectors) by a gate."""
    k = len(targets)
    t = u.T.reshape((-1,) + (2,) * w)
    axes = [1 + w - 1 - q for q in reversed(targets)]
    m = mat.reshape((2,) * (2 * k))
    out = jnp.tensordot(m, t, axes=(list(range(k, 2 * k)), axes))
    out = jnp.moveaxis(out, list(range(k)), axes)
    return out.reshape(u.shape[1], 2 ** w).T


def _trace_expr(window, keep):
    w = len(window)
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    rows, cols, out_r, out_c = [None] * w, [None] * w, [], []
    for j in range(w):
        q = window[w - 1 - j]
        if q in keep:
            rows[j], cols[j] = next(letters), next(letters)
            out_r.append(rows[j])
            out_c.append(cols[j])
        else:
            rows[j] = cols[j] = next(letters)
    return "".join(rows) + "".join(cols) + "->" + "".join(out_r) + "".join(out_c)


class _Piece:
    """Heisenberg-evolved Paulis on one lightcone window, as a function of parameters."""

    def __init__(self, gates, window, fixed_kind):
        self.window = list(window)
        self.w = len(window)
        pos = {q: i for i, q in enumerate(window)}
        self.ops = []
        for g in gates:
            loc = tuple(pos[q] for q in g[0])
            self.ops.append((loc, g[1]))
        self.fn = _GATE_FN[fixed_kind]

    def unitary(self, theta):
        u = jnp.eye(2 ** self.w, dtype=complex)
        for loc, spec in self.ops:
            mat = self.fn(theta[spec[1]]) if spec[0] == "param" else jnp.asarray(spec[1])
            u = _apply(u, mat, loc, self.w)
        return u


def _forward_lightcone(moments, k):
    s, kept = {k}, []
    for m in moments:
        for g in m:
            if s.intersection(g[0]):
                s.update(g[0])
                kept.append(g)
    return kept, sorted(s)


class Mode1Cost:
    """Per-qubit deviations ||R_k - I||_F^2 of W = V(theta)^dag T for a template ansatz.

    V is split into two halves so every evolved operator stays on a few qubits.
    """

    def __init__(self, target: Circuit, kind: str, n: int, qubits=None):
        self.n, self.kind = n, kind
        tmpl = ansatz_template(kind, n)
        moments = [[(pair, ("param", k)) for pair, k in layer] for layer in tmpl]
        half = len(moments) // 2
        va, vb = moments[:half], moments[half:]
        self.qubits = list(range(n)) if qubits is None else list(qubits)
        tinv = target.inverse()
        self.items = []
        for k in self.qubits:
            ga, wa = _forward_lightcone(va, k)
            # T Q_k T^dag as an explicit Pauli sum; its true support seeds the V_b lightcone
            qt = {p: heisenberg_evolve(tinv, PauliString.single(n, k, p)) for p in _PQ}
            seed = set().union(*(qt[p].support for p in _PQ))
            s, kept = set(seed), []
            for m in reversed(vb):
                for g in m:
                    if s.intersection(g[0]):
                        s.update(g[0])
                        kept.append(g)
            gb, wb = list(reversed(kept)), sorted(s)
            inter = sorted(set(wa) & set(wb))
            self.items.append(dict(
                a=_Piece(ga, wa, kind), b=_Piece(gb, wb, kind), inter=inter,
                ea=_trace_expr(wa, inter), eb=_trace_expr(wb, inter),
                pa={p: pauli_matrix("".join(p if q == k else "I" for q in wa)) for p in _PQ},
                pb={p: qt[p].matrix(wb) for p in _PQ},
                sa=2 ** (len(wa) - len(inter)), sb=2 ** (len(wb) - len(inter)),
            ))
        self._dev = jax.jit(self._deviations)
        self._vg = jax.jit(jax.value_and_grad(lambda th: jnp.sum(self._deviations(th))))

    def _ptm(self, theta, it):
        ua = it["a"].unitary(theta)
        ub = it["b"].unitary(theta)
        wa, wb, inter = it["a"].window, it["b"].window, it["inter"]
        di = 2 ** len(inter)
        rows = []
        a_red = []
        for p in _PQ:
            a = ua @ it["pa"][p] @ ua.conj().T           # V_a P V_a^dag
            t = jnp.einsum(it["ea"], a.reshape((2,) * (2 * len(wa)))).reshape(di, di) / it["sa"]
            a_red.append(t)
        b_red = []
        for q in _PQ:
            b = ub.conj().T @ it["pb"][q] @ ub          # V_b^dag (T Q T^dag) V_b
            t = jnp.einsum(it["eb"], b.reshape((2,) * (2 * len(wb)))).reshape(di, di) / it["sb"]
            b_red.append(t)
        for a in a_red:
            rows.append(jnp.stack([jnp.real(jnp.trace(a @ b)) / di for b in b_red]))
        return jnp.stack(rows)

    def _deviations(self, theta):
        devs = []
        for it in self.items:
            r = self._ptm(theta, it)
            devs.append(jnp.sum((r - jnp.eye(3)) ** 2))
        return jnp.stack(devs)

    def deviations(self, theta) -> np.ndarray:
        return np.asarray(self._dev(jnp.asarray(theta, dtype=float)))

    def __call__(self, theta) -> float:
        return float(np.sum(self.deviations(theta)))

    def value_and_grad(self, theta):
        v, g = self._vg(jnp.asarray(theta, dtype=float))
        return float(v), np.asarray(g)

    def grad(self, theta) -> np.ndarray:
        return self.value_and_grad(theta)[1]
