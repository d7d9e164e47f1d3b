"""Linear cross-entropy benchmarking estimators."""

from __future__ import annotations

import numpy as np


def xeb_normalized(sample_probs, mean_p_ideal: float, mean_p_uniform: float) -> float:
    """(<p>_samples - <p>_uniform) / (<p>_ideal - <p>_uniform)."""
    sp = np.asarray(sample_probs, dtype=float)
    if sp.size == 0:
        raise ValueError("no samples")
    return float((sp.mean() - mean_p_uniform) / (mean_p_ideal - mean_p_uniform))


def xeb_simple(sample_probs, n: int) -> float:
    """2^n <p>_samples - 1."""
    sp = np.asarray(sample_probs, dtype=float)
    if sp.size == 0:
        raise ValueError("no samples")
    return float(2.0 ** n * sp.mean() - 1.0)


def xeb_standard_error(sample_probs, mean_p_ideal: float, mean_p_uniform: float) -> float:
    sp = np.asarray(sample_probs, dtype=float)
    return float(sp.std(ddof=1) / np.sqrt(sp.size) / abs(mean_p_ideal - mean_p_uniform))


def xeb_score(samples, prob_oracle, n: int, form: str = "normalized", mean_p_ideal: float | None = None) -> float:
    """Score bitstring samples (rows of bits) against ``prob_oracle``.

    ``prob_oracle`` is either a full probability table indexed by the
    little-endian bitstring index, or a callable on a (k, n) bit array.
    """
    samples = np.atleast_2d(np.asarray(samples))
    if samples.shape[0] == 0 or samples.size == 0:
        raise ValueError("no samples")
    if callable(prob_oracle):
        sp = np.asarray(prob_oracle(samples), dtype=float)
    else:
        table = np.asarray(prob_oracle, dtype=float)
        sp = table[samples.astype(np.int64) @ (1 << np.arange(n, dtype=np.int64))]
        if mean_p_ideal is None:
            mean_p_ideal = float(np.sum(table ** 2))
    if form == "simple":
        return xeb_simple(sp, n)
    if mean_p_ideal is None:
        raise ValueError("normalized XEB needs <p> under the ideal distribution")
    return xeb_normalized(sp, mean_p_ideal, 2.0 ** -n)


def xeb_from_log2(log2_probs, k: int, n: int) -> float:
    """Normalized XEB for a distribution uniform on 2^k outcomes, from log2 p(y).

    Stays finite for n in the hundreds where 2^-n underflows.
    """
    lp = np.asarray(log2_probs, dtype=float)
    if lp.size == 0:
        raise ValueError("no samples")
    ratio = np.where(np.isfinite(lp), np.exp2(np.minimum(lp + k, 60.0)), 0.0)
    u = np.exp2(k - n)
    return float((ratio.mean() - u) / (1.0 - u))
