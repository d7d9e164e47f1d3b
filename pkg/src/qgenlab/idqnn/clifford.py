"""Clifford rounding and the stabilizer-tableau deep sampler."""

from __future__ import annotations

import numpy as np

from ..qcore.stabilizer import StabilizerTableau
from .lattice import IdqnnModel


def round_to_clifford(model: IdqnnModel) -> IdqnnModel:
    """beta -> (pi/2) * round(2 beta / pi), ties rounded up."""
    k = np.floor(2 * model.beta / np.pi + 0.5)
    return IdqnnModel(model.graph, k * np.pi / 2, model.seed)


def _z_powers(model: IdqnnModel) -> np.ndarray:
    k = 2 * model.beta / np.pi
    kr = np.rint(k)
    if np.abs(k - kr).max() > 1e-9:
        raise ValueError("model is not Clifford: every beta must be a multiple of pi/2")
    # exp(-i k pi/2 Z) is proportional to Z^k
    return kr.astype(np.int64) % 2


def _run(model: IdqnnModel, x, zpow, rng=None, forced=None) -> tuple[np.ndarray, float, int]:
    """One deep-form pass. Returns (y, log2 p(y), number of random events).

    With ``forced`` the outcomes are fixed and log2 p is -inf when impossible.
    """
    g = model.graph
    S, R = g.num_slices, g.register_size
    t = StabilizerTableau(R)
    y = np.zeros(model.num_sites, dtype=np.uint8)
    rand = 0
    for q in range(R):
        if x[q] == 0:
            t.h(q)
    for s in range(S):
        for q in np.nonzero(zpow[s * R:(s + 1) * R])[0]:
            t.z_gate(int(q))
        for a, b in g.slice_edges(s):
            t.cz(a, b)
        if s == S - 1:
            break
        for q in range(R):
            site = s * R + q
            if x[(s + 1) * R + q] == 0:
                bit = int(rng.integers(2)) if forced is None else int(forced[site])
                if bit:
                    t.z_gate(q)
                t.h(q)
                rand += 1
            else:
                t.h(q)
                try:
                    bit, r = t.measure_z(q, rng, None if forced is None else forced[site])
                except ValueError:
                    return y, -np.inf, rand
                rand += r
                if bit:
                    t.x_gate(q)
            y[site] = bit
    for q in range(R):
        site = (S - 1) * R + q
        t.h(q)
        try:
            bit, r = t.measure_z(q, rng, None if forced is None else forced[site])
        except ValueError:
            return y, -np.inf, rand
        rand += r
        y[site] = bit
    return y, -float(rand), rand


def sample_clifford(model: IdqnnModel, x, rng, shots: int | None = None, return_log2p: bool = False):
    """Stabilizer execution of the deep form for a Clifford-rounded model."""
    zpow = _z_powers(model)
    x = np.asarray(x, dtype=np.int64)
    k = 1 if shots is None else shots
    ys, lps = [], []
    for _ in range(k):
        y, lp, _ = _run(model, x, zpow, rng=rng)
        ys.append(y)
        lps.append(lp)
    ys, lps = np.array(ys), np.array(lps)
    if shots is None:
        ys, lps = ys[0], lps[0]
    return (ys, lps) if return_log2p else ys


def clifford_log2_prob(model: IdqnnModel, x, y) -> float:
    """log2 p(y | x) of the rounded model from a forced-outcome tableau run."""
    _, lp, _ = _run(model, np.asarray(x, dtype=np.int64), _z_powers(model), forced=np.asarray(y))
    return lp


def clifford_distribution(model: IdqnnModel, x) -> np.ndarray:
    """Full table by enumeration of forced runs (small instances)."""
    n = model.num_sites
    if n > 16:
        raise ValueError("enumeration limited to 16 sites")
    zpow = _z_powers(model)
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros(2 ** n)
    for idx in range(2 ** n):
        y = (idx >> np.arange(n)) & 1
        _, lp, _ = _run(model, x, zpow, forced=y)
        out[idx] = 2.0 ** lp if np.isfinite(lp) else 0.0
    return out
