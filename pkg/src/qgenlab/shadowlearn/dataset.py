"""Randomized-measurement datasets and their sufficient statistics.

A record holds the per-qubit stabilizer input labels and the per-qubit
measurement basis and bit.  Every estimator in this package only needs, for
each output qubit i and basis P, the signed histogram

    h_{i,P}[labels] = (1/N) sum_l <phi_{l,i}|P|phi_{l,i}> [input_l == labels]

over the input labels of a qubit window.  ``ShadowStatistics`` caches these
and can also be drawn directly from a multinomial when the dataset size is
too large to materialize record by record.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..qcore.circuit import Circuit
from ..qcore.gates import gate_matrix
from ..qcore.statevector import apply_matrix, basis_rotation, sample_rows

LABELS = ("0", "1", "+", "-", "y+", "y-")
BASES = ("X", "Y", "Z")
_S = 1 / np.sqrt(2)
LABEL_STATES = np.array([
    [1, 0], [0, 1], [_S, _S], [_S, -_S], [_S, 1j * _S], [_S, -1j * _S],
], dtype=complex)
# <label|Q|label> for Q in I, X, Y, Z
LABEL_EXPECT = np.array([
    [1, 0, 0, 1], [1, 0, 0, -1], [1, 1, 0, 0], [1, -1, 0, 0], [1, 0, 1, 0], [1, 0, -1, 0],
], dtype=float)
CHUNK = 4096
FULL_HIST_LIMIT = 7


@dataclass(frozen=True)
class MeasurementRecord:
    inputs: tuple
    outputs: tuple  # ((basis, bit), ...)

    def to_dict(self) -> dict:
        return {"inputs": list(self.inputs), "outputs": [[b, int(v)] for b, v in self.outputs]}


@dataclass
class MeasurementDataset:
    """Records stored column-wise: label indices, basis indices (X=0, Y=1, Z=2) and bits."""

    n: int
    inputs: np.ndarray
    bases: np.ndarray
    bits: np.ndarray

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.int8).reshape(-1, self.n)
        self.bases = np.asarray(self.bases, dtype=np.int8).reshape(-1, self.n)
        self.bits = np.asarray(self.bits, dtype=np.int8).reshape(-1, self.n)
        if not (self.inputs.shape == self.bases.shape == self.bits.shape):
            raise ValueError("label arrays must have equal shape")

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def record(self, idx: int) -> MeasurementRecord:
        return MeasurementRecord(
            tuple(LABELS[v] for v in self.inputs[idx]),
            tuple((BASES[b], int(v)) for b, v in zip(self.bases[idx], self.bits[idx])),
        )

    def records(self):
        for k in range(len(self)):
            yield self.record(k)

    def subset(self, count: int) -> "MeasurementDataset":
        return MeasurementDataset(self.n, self.inputs[:count], self.bases[:count], self.bits[:count])

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_dict()) + "\n" for r in self.records())

    @classmethod
    def from_jsonl(cls, text: str) -> "MeasurementDataset":
        ins, bs, bits = [], [], []
        for line in text.splitlines():
            if not line.strip():
                continue
            d = json.loads(line)
            ins.append([LABELS.index(v) for v in d["inputs"]])
            bs.append([BASES.index(b) for b, _ in d["outputs"]])
            bits.append([int(v) for _, v in d["outputs"]])
        if not ins:
            raise ValueError("empty dataset")
        return cls(len(ins[0]), ins, bs, bits)


def _evolve_inputs(target: Circuit, labels: np.ndarray) -> np.ndarray:
    """Statevectors U|psi> for a batch of label rows."""
    n = target.num_qubits
    psi = np.ones((labels.shape[0], 1), dtype=complex)
    for q in range(n):
        v = LABEL_STATES[labels[:, q]]  # (B, 2)
        psi = (v[:, :, None] * psi[:, None, :]).reshape(labels.shape[0], -1)
    for g in target.gates():
        psi = apply_matrix(psi, gate_matrix(g), g.targets, n)
    return psi


def collect_dataset(target: Circuit, N: int, rng, forced_inputs=None, forced_bases=None) -> MeasurementDataset:
    """Uniform stabilizer inputs, apply ``target``, measure each qubit in a uniform Pauli basis.

    ``forced_inputs`` / ``forced_bases`` (label or basis strings per qubit)
    override the random choices; they exist for tests.
    """
    if N < 1:
        raise ValueError("N must be positive")
    n = target.num_qubits
    inputs = rng.integers(0, 6, size=(N, n)).astype(np.int8)
    bases = rng.integers(0, 3, size=(N, n)).astype(np.int8)
    if forced_inputs is not None:
        inputs[:] = [LABELS.index(v) for v in forced_inputs]
    if forced_bases is not None:
        bases[:] = [BASES.index(b) for b in forced_bases]
    bits = np.empty((N, n), dtype=np.int8)
    rot = [basis_rotation(b) for b in BASES]
    for lo in range(0, N, CHUNK):
        hi = min(N, lo + CHUNK)
        psi = _evolve_inputs(target, inputs[lo:hi])
        for q in range(n):
            for b in range(3):
                rows = np.nonzero(bases[lo:hi, q] == b)[0]
                if rows.size:
                    psi[rows] = apply_matrix(psi[rows], rot[b], (q,), n)
        y = sample_rows(np.abs(psi) ** 2, rng)
        bits[lo:hi] = (y[:, None] >> np.arange(n)) & 1
    return MeasurementDataset(n, inputs, bases, bits)


def _label_index(labels: np.ndarray) -> np.ndarray:
    """Mixed-radix index with the first window qubit most significant."""
    idx = np.zeros(labels.shape[0], dtype=np.int64)
    for c in range(labels.shape[1]):
        idx = idx * 6 + labels[:, c]
    return idx


@dataclass
class ShadowStatistics:
    """Signed histograms h_{i,P} keyed by output qubit, basis and window."""

    n: int
    N: int
    dataset: MeasurementDataset | None = None
    full: dict = field(default_factory=dict)  # (i, P, squared) -> array (6,)*n
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dataset(cls, ds: MeasurementDataset) -> "ShadowStatistics":
        return cls(ds.n, len(ds), ds)

    @classmethod
    def sample(cls, target: Circuit, N: int, rng) -> "ShadowStatistics":
        """Draw the per-qubit signed histograms of an N-record dataset directly.

        For each output qubit the counts over (all input labels, basis, bit)
        follow a multinomial with the exact Born probabilities, so the
        marginal statistics equal those of ``collect_dataset``.  Different
        output qubits are sampled independently.
        """
        n = target.num_qubits
        if n > FULL_HIST_LIMIT:
            raise ValueError(f"direct sampling limited to {FULL_HIST_LIMIT} qubits")
        labels = np.array(np.unravel_index(np.arange(6 ** n), (6,) * n)).T  # first qubit slowest
        psi = np.concatenate([_evolve_inputs(target, labels[lo:lo + CHUNK])
                              for lo in range(0, labels.shape[0], CHUNK)])
        amps = psi.reshape((-1,) + (2,) * n)
        out = cls(n, int(N))
        for i in range(n):
            ax = 1 + n - 1 - i
            a = np.moveaxis(amps, ax, 1).reshape(amps.shape[0], 2, -1)
            rho = np.einsum("bjr,bkr->bjk", a, a.conj())  # reduced state of qubit i
            probs = np.empty((labels.shape[0], 3, 2))
            for b, name in enumerate(BASES):
                r = basis_rotation(name)
                p0 = np.real(np.einsum("j,bjk,k->b", r[0], rho, r[0].conj()))
                probs[:, b, 0] = np.clip(p0, 0, 1)
                probs[:, b, 1] = np.clip(1 - p0, 0, 1)
            probs /= 3 * labels.shape[0]
            flat = probs.reshape(-1)
            counts = rng.multinomial(int(N), flat / flat.sum()).reshape(probs.shape)
            signed = (counts[:, :, 0] - counts[:, :, 1]) / float(N)
            unsigned = (counts[:, :, 0] + counts[:, :, 1]) / float(N)
            for b, name in enumerate(BASES):
                out.full[(i, name, False)] = signed[:, b].reshape((6,) * n)
                out.full[(i, name, True)] = unsigned[:, b].reshape((6,) * n)
        return out

    def histogram(self, i: int, P: str, window, squared: bool = False) -> np.ndarray:
        """Signed histogram over the labels of ``window`` (axis order = window order).

        ``squared`` weights each record by <phi|P|phi>^2 instead, which the
        least-squares loss constant needs.
        """
        window = tuple(window)
        key = (i, P, window, squared)
        if key in self._cache:
            return self._cache[key]
        if (i, P, squared) in self.full:
            h = self.full[(i, P, squared)]
            drop = tuple(q for q in range(self.n) if q not in window)
            h = h.sum(axis=drop) if drop else h
            kept = [q for q in range(self.n) if q in window]
            h = np.transpose(h, [kept.index(q) for q in window])
        else:
            ds = self.dataset
            if ds is None:
                raise ValueError("no records and no sampled histogram for this qubit")
            b = BASES.index(P)
            sign = np.where(ds.bases[:, i] == b, 1.0 if squared else 1.0 - 2.0 * ds.bits[:, i], 0.0)
            idx = _label_index(ds.inputs[:, list(window)]) if window else np.zeros(len(ds), dtype=np.int64)
            h = np.bincount(idx, weights=sign, minlength=6 ** len(window)) / self.N
            h = h.reshape((6,) * len(window))
        self._cache[key] = h
        return h
