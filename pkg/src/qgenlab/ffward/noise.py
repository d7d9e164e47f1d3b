"""Noisy inference of compiled circuits and the faulty-identity mitigation transform."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qcore.circuit import Circuit
from ..qcore.gates import PAULI, gate_matrix
from ..qcore.statevector import apply_matrix, zero_state
from .learn import BlockResult, CompiledCircuit, assemble

DEFAULT_SHOTS = 200_000
DM_LIMIT = 10
_NONTRIVIAL_1Q = [PAULI[c] for c in "XYZ"]
_NONTRIVIAL_2Q = [np.kron(PAULI[a], PAULI[b]) for a in "IXYZ" for b in "IXYZ"][1:]


@dataclass(frozen=True)
class NoiseModel:
    p1: float = 1e-3  # depolarizing after each single-qubit gate
    p2: float = 5e-3  # depolarizing after each two-qubit gate
    readout: float = 1e-2  # symmetric readout flip

    def __post_init__(self):
        for v in (self.p1, self.p2, self.readout):
            if not 0.0 <= v <= 1.0:
                raise ValueError("noise probabilities must lie in [0, 1]")


NOISELESS = NoiseModel(0.0, 0.0, 0.0)


def _conj(rho, mat, targets, n):
    """mat rho mat^dag on an n-qubit density matrix."""
    rho = apply_matrix(rho, mat.conj(), targets, n)  # rho mat^dag
    return apply_matrix(rho.T, mat, targets, n).T


def _depolarize(rho, targets, p, n):
    """(1 - p) rho + p Tr_targets(rho) x I / 2^k, written as a Pauli twirl."""
    if p == 0.0:
        return rho
    paulis = _NONTRIVIAL_1Q if len(targets) == 1 else _NONTRIVIAL_2Q
    d2 = 4 ** len(targets)
    out = (1.0 - p * (d2 - 1) / d2) * rho
    for m in paulis:
        out = out + (p / d2) * _conj(rho, m, targets, n)
    return out


def _z_marginal(rho, q, n) -> float:
    diag = np.real(np.diag(rho))
    bit = (np.arange(2 ** n) >> q) & 1
    return float(np.sum(diag * (1 - 2 * bit)))


def _swap_out(rho, q, n, p2):
    """Move qubit q to a fresh ancilla and reset it through the noisy swap.

    Returns (<Z> carried by the ancilla, new density matrix).  Only the
    single-qubit marginal of the ancilla is kept, which is all the readout
    needs; the reset qubit is product with the rest after tracing.
    """
    z = (1.0 - p2) * _z_marginal(rho, q, n)
    t = rho.reshape((2,) * (2 * n))
    ax_r, ax_c = n - 1 - q, 2 * n - 1 - q
    reduced = np.trace(t, axis1=ax_r, axis2=ax_c)  # remaining 2(n-1) axes
    fresh = np.array([[1 - p2 / 2, 0], [0, p2 / 2]], dtype=complex)
    full = np.multiply.outer(reduced, fresh)  # new axes at the end: row q, col q
    # move them back into position
    full = np.moveaxis(full, [2 * n - 2, 2 * n - 1], [ax_r, ax_c])
    return z, full.reshape(2 ** n, 2 ** n)


def noisy_z_compiled(comp: CompiledCircuit, noise: NoiseModel) -> np.ndarray:
    """Exact noisy <Z_j> on the output register before readout error.

    Only the system register is simulated as a density matrix: every
    ancilla is touched exactly once, by the swap that hands it a finished
    system qubit, so its Z marginal is final at that moment.
    """
    n = comp.n
    if n > DM_LIMIT:
        raise ValueError(f"density-matrix simulation limited to {DM_LIMIT} system qubits")
    rho = np.zeros((2 ** n, 2 ** n), dtype=complex)
    rho[0, 0] = 1.0
    out = np.full(n, np.nan)
    for g in comp.circuit.gates():
        if g.kind == "SWAP" and g.targets[1] == g.targets[0] + n:
            q = g.targets[0]
            out[q], rho = _swap_out(rho, q, n, noise.p2)
            continue
        if any(q >= n for q in g.targets):
            raise ValueError("ancilla register touched outside the sewing swaps")
        rho = _conj(rho, gate_matrix(g), g.targets, n)
        rho = _depolarize(rho, g.targets, noise.p1 if len(g.targets) == 1 else noise.p2, n)
    if np.isnan(out).any():
        raise ValueError("some system qubit was never swapped out")
    return out


def noisy_z_circuit(circ: Circuit, noise: NoiseModel) -> np.ndarray:
    """Exact noisy <Z_j> of a plain n-qubit circuit on |0...0> before readout error."""
    n = circ.num_qubits
    if noise.p1 == 0.0 and noise.p2 == 0.0:
        psi = zero_state(n)
        for g in circ.gates():
            psi = apply_matrix(psi, gate_matrix(g), g.targets, n)
        p = np.abs(psi) ** 2
        bits = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
        return (p[:, None] * (1 - 2 * bits)).sum(axis=0)
    if n > DM_LIMIT:
        raise ValueError(f"density-matrix simulation limited to {DM_LIMIT} qubits")
    rho = np.zeros((2 ** n, 2 ** n), dtype=complex)
    rho[0, 0] = 1.0
    for g in circ.gates():
        rho = _conj(rho, gate_matrix(g), g.targets, n)
        rho = _depolarize(rho, g.targets, noise.p1 if len(g.targets) == 1 else noise.p2, n)
    return np.array([_z_marginal(rho, q, n) for q in range(n)])


def predict_observables(circuit, noise: NoiseModel | None = None, shots: int | None = None,
                        rng=None) -> np.ndarray:
    """Per-qubit <Z_j> of the output register from |0...0>.

    Without noise the exact expectation is returned.  With noise the exact
    noisy expectation is combined with the readout flip and, if ``shots``
    is given, replaced by the mean of that many sampled outcomes per qubit.
    """
    noise = noise or NOISELESS
    z = noisy_z_compiled(circuit, noise) if isinstance(circuit, CompiledCircuit) else noisy_z_circuit(circuit, noise)
    z = (1.0 - 2.0 * noise.readout) * z
    if shots is None:
        return z
    if shots < 1:
        raise ValueError("shots must be positive")
    p1 = np.clip((1.0 - z) / 2.0, 0.0, 1.0)
    ones = rng.binomial(shots, p1)
    return 1.0 - 2.0 * ones / shots


def faulty_identity(comp: CompiledCircuit) -> CompiledCircuit:
    """The same compiled layout with every ansatz parameter set to zero."""
    zeros = [BlockResult(b.block, b.window, b.qubits, np.zeros_like(b.theta), 0.0,
                         np.zeros_like(b.deviations), 0) for b in comp.blocks]
    return assemble(comp.n, zeros, comp.t)


def pauli_to_binary(p):
    """O = 1 - (P + 1)/2 maps a Pauli expectation to the probability of outcome 1."""
    return 1.0 - (np.asarray(p) + 1.0) / 2.0


def binary_to_pauli(o):
    return 1.0 - 2.0 * np.asarray(o)


def mitigate(raw, reference):
    """M(O) = (<O> - O^0) / (1 - 2 O^0) for binary observables O with reference O^0."""
    raw = np.asarray(raw, dtype=float)
    reference = np.asarray(reference, dtype=float)
    den = 1.0 - 2.0 * reference
    if np.any(np.abs(den) < 1e-6):
        raise ZeroDivisionError("reference too noisy: |1 - 2 O^0| < 1e-6")
    out = (raw - reference) / den
    return float(out) if out.ndim == 0 else out


def mitigate_pauli(raw_p, reference_p):
    """Mitigate Pauli expectations by mapping through the binary observable and back."""
    return binary_to_pauli(mitigate(pauli_to_binary(raw_p), pauli_to_binary(reference_p)))
