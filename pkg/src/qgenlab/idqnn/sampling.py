"""Shallow (brute force) and deep (teleportation register) IDQNN samplers."""

from __future__ import annotations

import numpy as np

from ..qcore.gates import H2
from ..qcore.statevector import apply_matrix, sample_rows
from .lattice import IdqnnModel, index_to_bits

DENSE_SITES = 16
DENSE_REGISTER = 12
_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _diag_phases(beta: np.ndarray, edges, n: int) -> np.ndarray:
    """Diagonal of prod_s exp(-i beta_s Z_s) * prod_edges CZ over n qubits."""
    idx = np.arange(2 ** n)
    bits = (idx[:, None] >> np.arange(n)) & 1
    z = 1 - 2 * bits
    phase = np.exp(-1j * (z @ np.asarray(beta, dtype=float)))
    par = np.zeros(2 ** n, dtype=np.int64)
    for a, b in edges:
        par ^= bits[:, a] & bits[:, b]
    return phase * (1 - 2 * par)


def _input_product(xbits: np.ndarray, n: int) -> np.ndarray:
    """Amplitudes of the product input: x=0 -> |+>, x=1 -> |0>. xbits shape (..., n)."""
    xbits = np.asarray(xbits, dtype=np.int64)
    idx = np.arange(2 ** n)
    bits = (idx[:, None] >> np.arange(n)) & 1  # (2^n, n)
    # factor per qubit: 1/sqrt2 if x=0, [b==0] if x=1
    fac = np.where(xbits[..., None, :] == 0, _INV_SQRT2, (bits == 0).astype(float))
    return np.prod(fac, axis=-1).astype(complex)


def _hadamard_all(psi: np.ndarray, n: int) -> np.ndarray:
    for q in range(n):
        psi = apply_matrix(psi, H2, (q,), n)
    return psi


def _check_x(model: IdqnnModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    if x.shape[-1] != model.num_sites or not np.isin(x, (0, 1)).all():
        raise ValueError("x must be a 0/1 array with one bit per site")
    return x


def exact_distribution(model: IdqnnModel, x) -> np.ndarray:
    """Born distribution over y (index = sum_s y_s 2^s) of the shallow circuit."""
    n = model.num_sites
    if n > DENSE_SITES:
        raise ValueError(f"{n} sites exceed the dense limit of {DENSE_SITES}")
    x = _check_x(model, x)
    psi = _input_product(x, n) * _diag_phases(model.beta, model.graph.edges, n)
    p = np.abs(_hadamard_all(psi, n)) ** 2
    return p / p.sum()


def sample_shallow(model: IdqnnModel, x, rng, shots: int | None = None) -> np.ndarray:
    """Draw y from the dense shallow circuit. Returns (n,) bits or (shots, n)."""
    p = exact_distribution(model, x)
    k = 1 if shots is None else shots
    idx = rng.choice(p.size, size=k, p=p)
    y = index_to_bits(idx, model.num_sites)
    return y[0] if shots is None else y


class _SliceOps:
    """Precomputed register data for the deep sampler."""

    def __init__(self, model: IdqnnModel):
        g = model.graph
        self.S, self.R = g.num_slices, g.register_size
        if self.R > DENSE_REGISTER:
            raise ValueError(f"register of {self.R} qubits exceeds {DENSE_REGISTER}")
        R = self.R
        self.diag = [_diag_phases(model.beta[s * R:(s + 1) * R], g.slice_edges(s), R) for s in range(self.S)]
        base = np.arange(2 ** R)
        self.idx0 = [base[((base >> q) & 1) == 0] for q in range(R)]
        self.idx1 = [i0 | (1 << q) for q, i0 in enumerate(self.idx0)]


def _teleport(psi, ops, q, y):
    """Register update when the next-slice input is |+>: psi -> H Z^y psi."""
    psi = psi.copy()
    psi[:, ops.idx1[q]] *= (1 - 2 * y)[:, None]
    return apply_matrix(psi, H2, (q,), ops.R)


def _measure_reset(psi, ops, q, rng):
    """X-basis measurement of register qubit q, then reset to |0>."""
    h = apply_matrix(psi, H2, (q,), ops.R)
    a0, a1 = h[:, ops.idx0[q]], h[:, ops.idx1[q]]
    p1 = np.sum(np.abs(a1) ** 2, axis=1)
    p1 = np.clip(p1 / np.sum(np.abs(h) ** 2, axis=1), 0.0, 1.0)
    y = (rng.random(psi.shape[0]) < p1).astype(np.int64)
    keep = np.where(y[:, None] == 1, a1, a0)
    norm = np.sqrt(np.sum(np.abs(keep) ** 2, axis=1))
    out = np.zeros_like(psi)
    out[:, ops.idx0[q]] = keep / norm[:, None]
    return out, y


def sample_deep(model: IdqnnModel, x, rng, shots: int | None = None) -> np.ndarray:
    """Deep-form sampler on the (D-1)-dimensional register, batched over shots.

    ``x`` may be one bitstring (shared by all shots) or an array (shots, n).
    """
    ops = _SliceOps(model)
    S, R = ops.S, ops.R
    x = _check_x(model, x)
    B = (1 if shots is None else shots) if x.ndim == 1 else x.shape[0]
    x = np.broadcast_to(x, (B, model.num_sites))
    y = np.zeros((B, model.num_sites), dtype=np.uint8)
    psi = _input_product(x[:, :R], R)
    for s in range(S):
        psi = psi * ops.diag[s]
        if s == S - 1:
            break
        for q in range(R):
            nxt = x[:, (s + 1) * R + q]
            tele = nxt == 0
            bits = np.zeros(B, dtype=np.int64)
            new = np.empty_like(psi)
            if tele.any():
                yt = rng.integers(0, 2, size=int(tele.sum()))
                new[tele] = _teleport(psi[tele], ops, q, yt)
                bits[tele] = yt
            if (~tele).any():
                pm, ym = _measure_reset(psi[~tele], ops, q, rng)
                new[~tele] = pm
                bits[~tele] = ym
            psi = new
            y[:, s * R + q] = bits
    probs = np.abs(_hadamard_all(psi, R)) ** 2
    last = sample_rows(probs, rng)
    y[:, (S - 1) * R:] = index_to_bits(last, R)
    return y[0] if shots is None and x.shape[0] == 1 and B == 1 else y


def exact_deep_distribution(model: IdqnnModel, x) -> np.ndarray:
    """Law of the deep sampler computed by enumerating every branch (no sampling)."""
    ops = _SliceOps(model)
    S, R, n = ops.S, ops.R, model.num_sites
    if n > DENSE_SITES + 4:
        raise ValueError("too many sites for branch enumeration")
    x = _check_x(model, x)
    psi = _input_product(x[:R], R)[None, :]
    labels = np.zeros(1, dtype=np.int64)  # partial y index per branch
    for s in range(S):
        psi = psi * ops.diag[s]
        if s == S - 1:
            break
        for q in range(R):
            site = s * R + q
            if x[(s + 1) * R + q] == 0:
                b0 = _teleport(psi, ops, q, np.zeros(len(psi), dtype=np.int64)) * _INV_SQRT2
                b1 = _teleport(psi, ops, q, np.ones(len(psi), dtype=np.int64)) * _INV_SQRT2
            else:
                h = apply_matrix(psi, H2, (q,), R)
                b0 = np.zeros_like(h)
                b1 = np.zeros_like(h)
                b0[:, ops.idx0[q]] = h[:, ops.idx0[q]]
                b1[:, ops.idx0[q]] = h[:, ops.idx1[q]]
            psi = np.concatenate([b0, b1])
            labels = np.concatenate([labels, labels | (1 << site)])
    probs = np.abs(_hadamard_all(psi, R)) ** 2  # (branches, 2^R)
    out = np.zeros(2 ** n)
    full = labels[:, None] | (np.arange(2 ** R)[None, :] << ((S - 1) * R))
    np.add.at(out, full.reshape(-1), probs.reshape(-1))
    return out


def empirical_distribution(y: np.ndarray) -> np.ndarray:
    y = np.atleast_2d(y)
    idx = y.astype(np.int64) @ (1 << np.arange(y.shape[1], dtype=np.int64))
    return np.bincount(idx, minlength=2 ** y.shape[1]) / len(idx)


def tvd(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
